"""Command line entry points: `serve` runs the HTTP sidecar, `finetune` trains offline."""

from __future__ import annotations

import argparse
import json
import os
import sys

DEFAULT_MODEL = "sentence-transformers/all-mpnet-base-v2"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="embed-service")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the embedding HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument(
        "--model",
        default=None,
        help=f"model id or checkpoint dir (default: $APST_MODEL or {DEFAULT_MODEL})",
    )
    serve.add_argument(
        "--mock",
        action="store_true",
        help="serve deterministic hash-based vectors instead of a model",
    )

    ft = sub.add_parser("finetune", help="fine-tune the model on exported training pairs")
    ft.add_argument("pairs_file", help="JSON-lines pairs file in the scorer export format")
    ft.add_argument("--model", default=None, help="base model id or checkpoint dir")
    ft.add_argument("--output", required=True, help="directory for the updated checkpoint")
    ft.add_argument("--epochs", type=int, default=30)
    ft.add_argument("--lr", type=float, default=1e-5)
    ft.add_argument("--margin", type=float, default=0.5)
    ft.add_argument("--batch-size", type=int, default=16)
    ft.add_argument("--seed", type=int, default=42)
    return parser


def resolve_model(flag_value) -> str:
    return flag_value or os.environ.get("APST_MODEL") or DEFAULT_MODEL


def cmd_serve(args) -> int:
    import uvicorn

    from .app import create_app

    if args.mock:
        from .encoders import MockEncoder

        factory = MockEncoder
    else:
        model_id = resolve_model(args.model)

        def factory():
            from .encoders import TransformerEncoder

            return TransformerEncoder(model_id)

    app = create_app(factory)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_finetune(args) -> int:
    from .finetune import PairsFileError, finetune

    try:
        summary = finetune(
            args.pairs_file,
            resolve_model(args.model),
            args.output,
            epochs=args.epochs,
            lr=args.lr,
            margin=args.margin,
            batch_size=args.batch_size,
            seed=args.seed,
        )
    except (PairsFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)
    return cmd_finetune(args)


if __name__ == "__main__":
    sys.exit(main())
