"""Similarity scoring, max aggregation, training loss, and pair generation."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .errors import ContractError, GenerationError
from .filtering import LogicalAPStore, match_query_aps
from .graph import Graph, Triple
from .paths import Path, PathCategory, classify_path
from .text import DescriptionStore, Encoder, format_path_sentence, format_query_sentence

NO_EVIDENCE_SCORE = -1.0


@dataclass(frozen=True)
class LossConfig:
    margin: float = 0.5
    budget: int = 3

    def __post_init__(self):
        if not -1.0 < self.margin < 1.0:
            raise ContractError(f"margin must lie in (-1, 1), got {self.margin}")
        if self.budget < 1:
            raise ContractError(f"budget must be >= 1, got {self.budget}")


@dataclass(frozen=True)
class ScoredTriple:
    triple: Triple
    score: float
    best_path: Optional[Path]
    path_scores: tuple[tuple[Path, float], ...]


@dataclass(frozen=True)
class TrainingExample:
    triple: Triple
    label: int
    paths: tuple[Path, ...]


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ContractError(f"dim mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ContractError("cosine similarity is undefined for a zero vector")
    return float(np.dot(a, b) / (na * nb))


def triplet_score(query_emb: np.ndarray, path_embs: list[np.ndarray]) -> tuple[float, Optional[int]]:
    """Max path similarity and its index; no paths means the no-evidence default."""
    if not path_embs:
        return NO_EVIDENCE_SCORE, None
    sims = [cosine_similarity(query_emb, p) for p in path_embs]
    best = max(range(len(sims)), key=lambda i: sims[i])
    return sims[best], best


def cosine_embedding_loss(score: float, label: int, cfg: LossConfig) -> float:
    if label == 1:
        return 1.0 - score
    if label == -1:
        return max(0.0, score - cfg.margin)
    raise ContractError(f"label must be 1 or -1, got {label}")


def path_kind(g: Graph, path: Path, query: Triple) -> str:
    """"CP" when the path closes the query pair, otherwise "AP"."""
    h, _, t = query
    category = classify_path(path, h, t)
    return "CP" if category is PathCategory.CLOSED_PATH else "AP"


def score_triple(
    g: Graph,
    query: Triple,
    paths: list[Path],
    encoder: Encoder,
    descriptions: DescriptionStore,
    mode: str = "detailed",
) -> ScoredTriple:
    """Score one candidate triple against its evidence paths."""
    if not paths:
        return ScoredTriple(query, NO_EVIDENCE_SCORE, None, ())
    sentences = [format_query_sentence(g, query, descriptions, mode)]
    sentences.extend(format_path_sentence(g, p, path_kind(g, p, query), descriptions, mode) for p in paths)
    embs = encoder.encode([s.text for s in sentences])
    score, best = triplet_score(embs[0], [embs[i] for i in range(1, len(sentences))])
    path_scores = tuple(
        (p, cosine_similarity(embs[0], embs[i + 1])) for i, p in enumerate(paths)
    )
    return ScoredTriple(query, score, paths[best] if best is not None else None, path_scores)


@dataclass
class TrainingPairConfig:
    negatives_per_positive: int = 5
    budget: int = 3
    seed: int = 42
    corrupt_heads: bool = False
    max_attempts: int = 1000


def generate_training_pairs(
    g_train: Graph,
    store: LogicalAPStore,
    cfg: TrainingPairConfig = TrainingPairConfig(),
) -> Iterator[TrainingExample]:
    """Yield one positive plus N corrupted examples per training triple.

    Corruptions replace the tail (optionally the head) with a uniformly
    sampled entity whose triple is absent from the graph. The stream is
    fully determined by the seed.
    """
    rng = random.Random(cfg.seed)
    if g_train.num_entities < 2:
        raise GenerationError("graph too small to corrupt triples")
    for triple in g_train.triples:
        h, r, t = triple
        if g_train.is_inverse(r):
            continue
        paths = match_query_aps(g_train, triple, store, cfg.budget, rng_seed=rng.randrange(2**31))
        yield TrainingExample(triple, 1, tuple(paths))
        for _ in range(cfg.negatives_per_positive):
            corrupted = _corrupt(g_train, triple, rng, cfg)
            neg_paths = match_query_aps(
                g_train, corrupted, store, cfg.budget, rng_seed=rng.randrange(2**31)
            )
            yield TrainingExample(corrupted, -1, tuple(neg_paths))


def _corrupt(g: Graph, triple: Triple, rng: random.Random, cfg: TrainingPairConfig) -> Triple:
    h, r, t = triple
    for _ in range(cfg.max_attempts):
        e = rng.randrange(g.num_entities)
        if cfg.corrupt_heads and rng.random() < 0.5:
            candidate = (e, r, t)
        else:
            candidate = (h, r, e)
        if candidate != triple and not g.has_triple(candidate):
            return candidate
    raise GenerationError("could not find a corrupting entity; graph too dense or too small")


def export_training_pairs(
    examples: Iterator[TrainingExample],
    g: Graph,
    descriptions: DescriptionStore,
    path,
    mode: str = "detailed",
) -> int:
    """Write the (query sentence, path sentences, label) stream as JSON-lines."""
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            record = {
                "query_sentence": format_query_sentence(g, ex.triple, descriptions, mode).text,
                "path_sentences": [
                    format_path_sentence(g, p, path_kind(g, p, ex.triple), descriptions, mode).text
                    for p in ex.paths
                ],
                "label": ex.label,
            }
            fh.write(json.dumps(record, separators=(",", ":")) + "\n")
            count += 1
    return count
