"""HTTP app: POST /embed batches sentences into vectors, GET /health reports readiness.

Wire protocol: /embed takes {"sentences": [...]} (1-256 nonempty strings)
and returns {"dim": N, "embeddings": [[...], ...]} with one equal-length,
finite vector per sentence, in request order. Errors carry {"error": "..."}.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Callable

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

MAX_BATCH = 256


class EmbedRequest(BaseModel):
    sentences: list[str]


def create_app(encoder_factory: Callable[[], object], eager: bool = True) -> FastAPI:
    """Build the app around a lazily constructed encoder.

    `encoder_factory` is called once, on startup when `eager` or on the
    first request otherwise; until it returns, /health answers 503.
    """
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if eager:
            get_encoder()
        yield

    app = FastAPI(title="embed-service", lifespan=lifespan)
    app.state.encoder = None

    def get_encoder():
        if app.state.encoder is None:
            app.state.encoder = encoder_factory()
        return app.state.encoder

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": message})

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception):
        return error(500, f"{type(exc).__name__}: {exc}")

    @app.get("/health")
    def health():
        if app.state.encoder is None:
            return error(503, "model not loaded")
        enc = app.state.encoder
        return {"status": "ok", "dim": enc.dim, "model": enc.name}

    @app.post("/embed")
    def embed(req: EmbedRequest):
        if not req.sentences:
            return error(400, "sentences must be a nonempty list")
        if len(req.sentences) > MAX_BATCH:
            return error(413, f"batch of {len(req.sentences)} exceeds the {MAX_BATCH}-sentence limit")
        if any(not s for s in req.sentences):
            return error(400, "sentences must all be nonempty")
        enc = get_encoder()
        vectors = enc.encode(req.sentences)
        if not np.isfinite(vectors).all():
            return error(500, "model produced non-finite embeddings")
        return {"dim": int(vectors.shape[1]), "embeddings": vectors.tolist()}

    return app
