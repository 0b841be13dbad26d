"""Command-line entry point: stats, mine-store, export-train-pairs, eval, explain.

Exit codes: 0 success, 2 input/config error, 3 remote-encoder failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .config import RunConfig
from .errors import AnchorPathError, ConfigError, EncoderTransportError
from .evaluation import run_experiment
from .filtering import LogicalAPStore, build_logical_ap_store, match_query_aps
from .graph import augment_inverses, graph_stats, load_triples
from .scoring import (
    TrainingPairConfig,
    generate_training_pairs,
    export_training_pairs,
    path_kind,
    score_triple,
)
from .text import DescriptionStore, get_encoder, load_descriptions

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SERVICE = 3


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--train", help="training triple file")
    p.add_argument("--test", help="test triple file")
    p.add_argument("--candidates", help="candidate-set file")
    p.add_argument("--descriptions", help="detailed description file")
    p.add_argument("--short-descriptions", dest="short_descriptions", help="short description file")
    p.add_argument("--store", help="logical chain store file")
    p.add_argument("--depth", type=int, help="path search depth (default 2)")
    p.add_argument("--min-acc", dest="min_acc", type=float, help="accuracy threshold (default 0.5)")
    p.add_argument("--min-rec", dest="min_rec", type=float, help="recall threshold (default 0.5)")
    p.add_argument("--budget-l", dest="budget_l", type=int, help="paths per query (default 3)")
    p.add_argument("--margin", type=float, help="loss margin in (-1, 1) (default 0.5)")
    p.add_argument(
        "--negatives-per-positive", dest="negatives_per_positive", type=int,
        help="corrupted examples per training triple (default 5)",
    )
    p.add_argument("--seed", type=int, help="random seed (default 42)")
    p.add_argument("--encoder", help="'builtin' or a sidecar URL (default builtin)")
    p.add_argument("--ablation", choices=["SC", "SA", "DC", "DA"], help="description/path ablation axis")
    p.add_argument("--mode", choices=["transductive", "inductive"], help="evaluation mode")
    p.add_argument("--workers", type=int, help="parallel query workers")
    p.add_argument(
        "--candidate-set-size", dest="candidate_set_size", type=int,
        help="candidates per ranking problem (default 50)",
    )


def _build_config(args: argparse.Namespace) -> RunConfig:
    fields = set(RunConfig.__dataclass_fields__)
    overrides = {k: v for k, v in vars(args).items() if k in fields}
    if overrides.get("encoder") is None and os.environ.get("APST_ENCODER_URL"):
        overrides["encoder"] = os.environ["APST_ENCODER_URL"]
    return RunConfig.from_sources(getattr(args, "config", None), overrides)


def _load_description_store(config: RunConfig) -> DescriptionStore:
    store = DescriptionStore()
    if config.short_descriptions:
        load_descriptions(config.short_descriptions, "short", store)
    if config.descriptions:
        load_descriptions(config.descriptions, "detailed", store)
    return store


def cmd_stats(args: argparse.Namespace) -> int:
    g = load_triples(args.graph)
    print(graph_stats(g).to_json())
    return EXIT_OK


def cmd_mine_store(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not config.train:
        raise ConfigError("mine-store requires --train")
    if not config.store:
        raise ConfigError("mine-store requires --store (output file)")
    g = augment_inverses(load_triples(config.train))
    store = build_logical_ap_store(g, config.depth, config.min_acc, config.min_rec)
    store.save(config.store)
    for relation in store.by_relation:
        kept = len(store.by_relation[relation])
        print(f"{relation}\tkept={kept}\tdropped={store.dropped.get(relation, 0)}")
    total = sum(len(v) for v in store.by_relation.values())
    print(f"total kept={total} -> {config.store}")
    return EXIT_OK


def cmd_export_train_pairs(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not config.train:
        raise ConfigError("export-train-pairs requires --train")
    if not args.output:
        raise ConfigError("export-train-pairs requires --output")
    g = augment_inverses(load_triples(config.train))
    if config.store and os.path.exists(config.store):
        store = LogicalAPStore.load(config.store)
    else:
        store = build_logical_ap_store(g, config.depth, config.min_acc, config.min_rec)
    descriptions = _load_description_store(config)
    pairs = generate_training_pairs(
        g,
        store,
        TrainingPairConfig(
            negatives_per_positive=config.negatives_per_positive,
            budget=config.budget_l,
            seed=config.seed,
        ),
    )
    count = export_training_pairs(pairs, g, descriptions, args.output, config.description_mode)
    print(f"wrote {count} examples -> {args.output}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = _build_config(args)
    report = run_experiment(config)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
    agg = report["aggregate"]
    for warning in report["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    print(f"MRR={agg['mrr']:.3f} Hit@1={agg['hit_at_1']:.3f}")
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    config = _build_config(args)
    if not config.train:
        raise ConfigError("explain requires --train")
    g = augment_inverses(load_triples(config.train))
    if config.store and os.path.exists(config.store):
        store = LogicalAPStore.load(config.store)
    else:
        store = build_logical_ap_store(g, config.depth, config.min_acc, config.min_rec)
    descriptions = _load_description_store(config)
    encoder = get_encoder(config.encoder)
    query = (g.entity_id(args.head), g.relation_id(args.relation), g.entity_id(args.tail))
    paths = match_query_aps(
        g, query, store, config.budget_l, rng_seed=config.seed, include_aps=config.include_aps
    )
    result = score_triple(g, query, paths, encoder, descriptions, config.description_mode)
    print(f"query: {args.head} --{args.relation}--> {args.tail}")
    print(f"score: {result.score:.4f}")
    if not result.path_scores:
        print("no supporting evidence (no closed paths, no stored chains matched)")
    for path, sim in sorted(result.path_scores, key=lambda ps: -ps[1]):
        kind = path_kind(g, path, query)
        steps = [g.entity_surface(path.entities[0])]
        for rel, ent in zip(path.relations, path.entities[1:]):
            steps.append(f"--{g.relation_surface(rel)}--> {g.entity_surface(ent)}")
        marker = " *" if result.best_path == path else ""
        print(f"  [{kind}] sim={sim:.4f} {' '.join(steps)}{marker}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anchorpath",
        description="Knowledge-graph relation prediction from mined anchored paths",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_stats = sub.add_parser("stats", help="print triple/entity/relation counts as JSON")
    p_stats.add_argument("graph", help="triple file")
    p_stats.set_defaults(func=cmd_stats)

    p_mine = sub.add_parser("mine-store", help="mine, filter, and save logical chains")
    _add_config_flags(p_mine)
    p_mine.set_defaults(func=cmd_mine_store)

    p_export = sub.add_parser("export-train-pairs", help="export labeled sentence pairs as JSON-lines")
    _add_config_flags(p_export)
    p_export.add_argument("--output", required=True, help="output JSON-lines file")
    p_export.set_defaults(func=cmd_export_train_pairs)

    p_eval = sub.add_parser("eval", help="rank candidate sets and report MRR / Hit@1")
    _add_config_flags(p_eval)
    p_eval.add_argument("--report", help="write the full JSON report here")
    p_eval.set_defaults(func=cmd_eval)

    p_explain = sub.add_parser("explain", help="show matched paths and scores for one query")
    _add_config_flags(p_explain)
    p_explain.add_argument("--head", required=True)
    p_explain.add_argument("--relation", required=True)
    p_explain.add_argument("--tail", required=True)
    p_explain.set_defaults(func=cmd_explain)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EncoderTransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SERVICE
    except (AnchorPathError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
