"""Candidate ranking and MRR / Hit@1 evaluation over 50-way candidate sets."""

from __future__ import annotations

import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .config import RunConfig
from .errors import ConfigError, ContractError, ValidationError
from .filtering import LogicalAPStore, build_logical_ap_store, match_query_aps
from .graph import Graph, Triple, augment_inverses, load_triples
from .paths import Path
from .scoring import score_triple
from .text import DescriptionStore, Encoder, get_encoder, load_descriptions

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateSet:
    """One ranking problem: the true triple and its candidate tails."""

    query: tuple[str, str, str]  # surfaces; resolved against the evaluation graph
    candidates: tuple[str, ...]

    def validate(self, expected_size: int = 50) -> "CandidateSet":
        if len(self.candidates) != expected_size:
            raise ValidationError(
                f"candidate set for {self.query} has {len(self.candidates)} entries, expected {expected_size}"
            )
        positives = [c for c in self.candidates if c == self.query[2]]
        if len(positives) != 1:
            raise ValidationError(
                f"candidate set for {self.query} contains the positive {len(positives)} times"
            )
        return self


@dataclass(frozen=True)
class RankingResult:
    query: tuple[str, str, str]
    rank: int
    scores: tuple[tuple[str, float], ...]
    best_path: Optional[Path] = None


@dataclass
class ScorerContext:
    graph: Graph
    store: LogicalAPStore
    encoder: Encoder
    descriptions: DescriptionStore
    budget_l: int = 3
    seed: int = 42
    include_aps: bool = True
    description_mode: str = "detailed"
    depth: Optional[int] = None


def load_candidate_sets(path) -> list[CandidateSet]:
    """Read ranking problems from block format or JSON-lines.

    Block format: the ground-truth triple line, then one candidate tail
    per line, blocks separated by blank lines. JSON-lines: one object
    {"head", "relation", "tail", "candidates": [...]} per line.
    """
    sets: list[CandidateSet] = []
    with open(path, encoding="utf-8") as fh:
        content = fh.read()
    stripped = content.lstrip()
    if stripped.startswith("{"):
        for lineno, line in enumerate(content.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                query = (rec["head"], rec["relation"], rec["tail"])
                sets.append(CandidateSet(query, tuple(rec["candidates"])))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValidationError(f"{path}:{lineno}: bad candidate record: {exc}") from exc
        return sets
    for block in content.split("\n\n"):
        lines = [ln for ln in block.splitlines() if ln.strip()]
        if not lines:
            continue
        fields = lines[0].split("\t")
        if len(fields) != 3:
            raise ValidationError(f"{path}: block header {lines[0]!r} is not a triple")
        query = (fields[0], fields[1], fields[2])
        candidates = tuple(ln.strip() for ln in lines[1:])
        sets.append(CandidateSet(query, candidates))
    return sets


def rank_candidates(cs: CandidateSet, ctx: ScorerContext, expected_size: int = 50) -> RankingResult:
    """Score every candidate tail and rank the positive one.

    Ties break by candidate surface string ascending, so the result does
    not depend on candidate order.
    """
    cs.validate(expected_size)
    g = ctx.graph
    h_surf, r_surf, t_surf = cs.query
    h = g.entity_id(h_surf)
    r = g.relation_id(r_surf)

    scored: list[tuple[str, float, Optional[Path]]] = []
    for cand in cs.candidates:
        c = g.entity_id(cand)
        query: Triple = (h, r, c)
        paths = match_query_aps(
            g,
            query,
            ctx.store,
            ctx.budget_l,
            rng_seed=ctx.seed,
            include_aps=ctx.include_aps,
            depth=ctx.depth,
        )
        result = score_triple(g, query, paths, ctx.encoder, ctx.descriptions, ctx.description_mode)
        scored.append((cand, result.score, result.best_path))

    scored.sort(key=lambda row: (-row[1], row[0]))
    rank = next(i for i, row in enumerate(scored, start=1) if row[0] == t_surf)
    best_path = next(row[2] for row in scored if row[0] == t_surf)
    return RankingResult(
        query=cs.query,
        rank=rank,
        scores=tuple((cand, score) for cand, score, _ in scored),
        best_path=best_path,
    )


def aggregate_metrics(results: list[RankingResult]) -> tuple[float, float]:
    """(MRR, Hit@1) over the per-query ranks."""
    if not results:
        raise ContractError("aggregate_metrics requires at least one result")
    mrr = sum(1.0 / r.rank for r in results) / len(results)
    hit1 = sum(1 for r in results if r.rank == 1) / len(results)
    return mrr, hit1


def check_entity_disjointness(g_train: Graph, g_test: Graph) -> list[str]:
    """Entities shared between graphs; nonempty means the split is not inductive."""
    train_entities = {g_train.entity_surface(e) for e in g_train.entities()}
    return sorted(
        s for s in (g_test.entity_surface(e) for e in g_test.entities()) if s in train_entities
    )


def run_experiment(config: RunConfig, encoder: Optional[Encoder] = None) -> dict:
    """End-to-end evaluation: build/load the store, rank every candidate set,
    aggregate, and return the JSON-ready report."""
    config.validate()
    started = time.monotonic()
    if not config.train:
        raise ConfigError("train graph file is required")
    if not config.candidates:
        raise ConfigError("candidate file is required")

    g_train = augment_inverses(load_triples(config.train))
    g_test = augment_inverses(load_triples(config.test)) if config.test else g_train

    warnings: list[str] = []
    if config.mode == "inductive":
        if config.test is None:
            raise ConfigError("inductive mode requires a test graph file")
        overlap = check_entity_disjointness(g_train, g_test)
        if overlap:
            msg = f"inductive mode but {len(overlap)} entities overlap train/test (e.g. {overlap[:5]})"
            logger.warning(msg)
            warnings.append(msg)
        evidence = g_test
    else:
        evidence = g_train

    if config.store and os.path.exists(config.store):
        store = LogicalAPStore.load(config.store)
    else:
        store = build_logical_ap_store(g_train, config.depth, config.min_acc, config.min_rec)
        if config.store:
            store.save(config.store)

    descriptions = DescriptionStore()
    if config.short_descriptions:
        load_descriptions(config.short_descriptions, "short", descriptions)
    if config.descriptions:
        load_descriptions(config.descriptions, "detailed", descriptions)

    ctx = ScorerContext(
        graph=evidence,
        store=store,
        encoder=encoder if encoder is not None else get_encoder(config.encoder),
        descriptions=descriptions,
        budget_l=config.budget_l,
        seed=config.seed,
        include_aps=config.include_aps,
        description_mode=config.description_mode,
        depth=config.depth,
    )

    candidate_sets = load_candidate_sets(config.candidates)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(
                pool.map(lambda cs: rank_candidates(cs, ctx, config.candidate_set_size), candidate_sets)
            )
    else:
        results = [rank_candidates(cs, ctx, config.candidate_set_size) for cs in candidate_sets]

    mrr, hit1 = aggregate_metrics(results)
    report = {
        "config": config.to_dict(),
        "queries": [
            {
                "head": r.query[0],
                "relation": r.query[1],
                "tail": r.query[2],
                "rank": r.rank,
                "score": dict(r.scores)[r.query[2]],
                "best_path": json.loads(r.best_path.to_json(evidence)) if r.best_path else None,
            }
            for r in results
        ],
        "aggregate": {"mrr": mrr, "hit_at_1": hit1},
        "warnings": warnings,
        "timing_seconds": time.monotonic() - started,
    }
    return report
