"""Sentence formation for triples and paths, plus pluggable sentence encoders.

The built-in encoder is a deterministic hashed bag-of-tokens embedding so
the whole scoring pipeline runs offline; a remote encoder speaks the
HTTP protocol served by the embedding sidecar.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Optional, Protocol

import numpy as np
import requests

from .errors import ContractError, EncoderTransportError, ParseError
from .graph import Graph, Triple
from .paths import Path

logger = logging.getLogger(__name__)

MAX_SENTENCE_TOKENS = 512
BUILTIN_DIM = 384


@dataclass
class DescriptionStore:
    """Entity descriptions in two tiers, keyed by entity surface string."""

    short: dict[str, str] = field(default_factory=dict)
    detailed: dict[str, str] = field(default_factory=dict)

    def describe(self, surface: str, mode: str = "detailed") -> str:
        if mode == "detailed":
            return self.detailed.get(surface) or self.short.get(surface) or surface
        if mode == "short":
            return self.short.get(surface) or surface
        raise ContractError(f"mode must be 'short' or 'detailed', got {mode!r}")


def load_descriptions(path, tier: str, store: DescriptionStore) -> int:
    """Merge an entity<TAB>description file into one tier of the store.

    Later duplicates overwrite earlier ones; returns the overwrite count.
    """
    if tier not in ("short", "detailed"):
        raise ContractError(f"tier must be 'short' or 'detailed', got {tier!r}")
    target = store.short if tier == "short" else store.detailed
    overwrites = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            fields = line.split("\t", 1)
            if len(fields) != 2 or not fields[1].strip():
                raise ParseError(path, lineno, "expected entity<TAB>description")
            entity, description = fields
            if entity in target:
                overwrites += 1
            target[entity] = description.strip()
    if overwrites:
        logger.warning("%s: %d duplicate entities overwritten", path, overwrites)
    return overwrites


@dataclass(frozen=True)
class Sentence:
    text: str
    kind: str  # "CP" | "AP" | "Query"


def _entity_tokens(surface: str, store: DescriptionStore, mode: str) -> list[str]:
    description = store.describe(surface, mode)
    if description == surface:
        return [surface]  # fallback: do not repeat the surface token
    return [surface, description]


def _finish(tokens: list[str], kind: str) -> Sentence:
    text = " ".join(tokens)
    words = text.split()
    if len(words) > MAX_SENTENCE_TOKENS:
        logger.warning("sentence truncated from %d to %d tokens", len(words), MAX_SENTENCE_TOKENS)
        text = " ".join(words[:MAX_SENTENCE_TOKENS])
    return Sentence(text=text, kind=kind)


def format_query_sentence(g: Graph, triple: Triple, store: DescriptionStore, mode: str = "detailed") -> Sentence:
    h, r, t = triple
    tokens = _entity_tokens(g.entity_surface(h), store, mode)
    tokens.append(g.relation_surface(r))
    tokens.extend(_entity_tokens(g.entity_surface(t), store, mode))
    return _finish(tokens, "Query")


def format_path_sentence(g: Graph, path: Path, kind: str, store: DescriptionStore, mode: str = "detailed") -> Sentence:
    """Verbalize a path. Closed paths interleave every entity with every
    relation; anchored paths keep only the two endpoint entities. Either
    way only the endpoints carry descriptions."""
    if kind not in ("CP", "AP"):
        raise ContractError(f"kind must be 'CP' or 'AP', got {kind!r}")
    tokens = _entity_tokens(g.entity_surface(path.start), store, mode)
    if kind == "CP":
        for i, rel in enumerate(path.relations):
            tokens.append(g.relation_surface(rel))
            if i + 1 < len(path.relations):
                tokens.append(g.entity_surface(path.entities[i + 1]))
    else:
        tokens.extend(g.relation_surface(rel) for rel in path.relations)
    tokens.extend(_entity_tokens(g.entity_surface(path.end), store, mode))
    return _finish(tokens, kind)


# -- encoders -----------------------------------------------------------------


def hashed_embedding(text: str, dim: int = BUILTIN_DIM) -> np.ndarray:
    """Deterministic signed-hash embedding of whitespace tokens and bigrams.

    Every token and adjacent-token bigram is hashed (sha256) into one of
    ``dim`` buckets with a parity-derived sign; the result is L2-normalized.
    Platform-independent by construction.
    """
    tokens = text.split()[:MAX_SENTENCE_TOKENS]
    features = list(tokens)
    features.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    vec = np.zeros(dim, dtype=np.float64)
    for feat in features:
        digest = hashlib.sha256(feat.encode("utf-8")).digest()
        bucket = int.from_bytes(digest[:4], "big") % dim
        sign = 1.0 if digest[4] % 2 == 0 else -1.0
        vec[bucket] += sign
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        vec[0] = 1.0
        return vec
    return vec / norm


class Encoder(Protocol):
    dim: int

    def encode(self, texts: list[str]) -> np.ndarray: ...


class HashedEncoder:
    """The built-in offline encoder; unit-norm, deterministic across runs."""

    def __init__(self, dim: int = BUILTIN_DIM):
        self.dim = dim

    def encode(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.stack([hashed_embedding(t, self.dim) for t in texts])


class RemoteEncoder:
    """Client for the HTTP embedding sidecar (POST /embed, GET /health)."""

    def __init__(self, url: str, timeout: float = 30.0, retries: int = 3, batch_size: int = 256):
        self.url = url.rstrip("/")
        self.timeout = timeout
        self.retries = retries
        self.batch_size = batch_size
        self._dim: Optional[int] = None

    def _post(self, sentences: list[str]) -> dict:
        last_error: Optional[Exception] = None
        for attempt in range(1, self.retries + 1):
            try:
                resp = requests.post(
                    f"{self.url}/embed", json={"sentences": sentences}, timeout=self.timeout
                )
                if resp.status_code != 200:
                    raise EncoderTransportError(
                        f"encoder returned {resp.status_code}: {resp.text[:200]}", attempt
                    )
                return resp.json()
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
        raise EncoderTransportError(f"encoder unreachable at {self.url}: {last_error}", self.retries)

    @property
    def dim(self) -> int:
        if self._dim is None:
            try:
                resp = requests.get(f"{self.url}/health", timeout=self.timeout)
                resp.raise_for_status()
                self._dim = int(resp.json()["dim"])
            except (requests.RequestException, ValueError, KeyError) as exc:
                raise EncoderTransportError(f"health check failed at {self.url}: {exc}", 1) from exc
        return self._dim

    def encode(self, texts: list[str]) -> np.ndarray:
        rows: list[list[float]] = []
        dim: Optional[int] = None
        for i in range(0, len(texts), self.batch_size):
            payload = self._post(texts[i : i + self.batch_size])
            batch_dim = int(payload["dim"])
            if dim is None:
                dim = batch_dim
            elif dim != batch_dim:
                raise EncoderTransportError("embedding dim changed across batches", 1)
            if any(len(v) != batch_dim for v in payload["embeddings"]):
                raise EncoderTransportError("embedding length does not match reported dim", 1)
            rows.extend(payload["embeddings"])
        if dim is not None:
            self._dim = dim
        if not rows:
            return np.zeros((0, self.dim), dtype=np.float64)
        arr = np.asarray(rows, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise EncoderTransportError("non-finite values in embedding response", 1)
        return arr


def encode(sentences: list[Sentence], encoder: Encoder) -> np.ndarray:
    """Embed sentences in order; one row per sentence, uniform dimension."""
    return encoder.encode([s.text for s in sentences])


def get_encoder(spec: str) -> Encoder:
    """"builtin" or an http(s) URL of the embedding sidecar."""
    if spec == "builtin":
        return HashedEncoder()
    if spec.startswith("http://") or spec.startswith("https://"):
        return RemoteEncoder(spec)
    raise ContractError(f"encoder must be 'builtin' or an http(s) URL, got {spec!r}")
