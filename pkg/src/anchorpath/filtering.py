"""Chain rationality scoring and the per-relation logical chain store.

For a query relation r_q and a relation chain, every training entity
falls in exactly one of four buckets depending on whether it starts a
path matching the chain and whether it heads an r_q triple. The two
derived ratios (accuracy, recall) decide which chains survive into the
store that test-time matching consults.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from .errors import ContractError, UnknownRelationError, ValidationError
from .graph import Graph, Triple, relation_heads
from .paths import (
    Path,
    chain_satisfiable,
    enumerate_anchoring_paths,
    enumerate_closed_paths,
)

SIDES = ("head", "tail")


@dataclass(frozen=True)
class EntityCategoryCounts:
    pt: int
    po: int
    to: int
    nc: int

    @property
    def total(self) -> int:
        return self.pt + self.po + self.to + self.nc


def ap_metrics(counts: EntityCategoryCounts) -> tuple[Optional[float], Optional[float]]:
    """(accuracy, recall) = (pt/(po+pt), pt/(to+pt)); None on a zero denominator."""
    accuracy = counts.pt / (counts.po + counts.pt) if counts.po + counts.pt > 0 else None
    recall = counts.pt / (counts.to + counts.pt) if counts.to + counts.pt > 0 else None
    return accuracy, recall


@dataclass(frozen=True)
class APStatistics:
    """Filter statistics for one (query relation, side, chain) combination.

    Chains are stored as relation surface strings so a store built on one
    graph can be matched against another graph's interning.
    """

    relation: str
    side: str
    chain: tuple[str, ...]
    counts: EntityCategoryCounts
    accuracy: Optional[float]
    recall: Optional[float]

    def to_record(self) -> dict:
        return {
            "relation": self.relation,
            "side": self.side,
            "chain": list(self.chain),
            "pt": self.counts.pt,
            "po": self.counts.po,
            "to": self.counts.to,
            "nc": self.counts.nc,
            "accuracy": self.accuracy,
            "recall": self.recall,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "APStatistics":
        return cls(
            relation=rec["relation"],
            side=rec["side"],
            chain=tuple(rec["chain"]),
            counts=EntityCategoryCounts(rec["pt"], rec["po"], rec["to"], rec["nc"]),
            accuracy=rec["accuracy"],
            recall=rec["recall"],
        )


def collect_chain_heads(g: Graph, chain: tuple[int, ...]) -> set[int]:
    """Entities from which some simple path matches the chain exactly."""
    if not chain:
        raise ContractError("chain must be nonempty")
    for rid in chain:
        if not 0 <= rid < g.num_relations:
            raise UnknownRelationError(rid)
    # Simple paths cannot revisit an entity, so a self-loop never opens a chain.
    starts = {h for h, t in g.relation_edges[chain[0]] if h != t}
    if len(chain) == 1:
        return starts
    return {e for e in sorted(starts) if chain_satisfiable(g, e, chain)}


def _inverse_chain(g: Graph, chain: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(g.inverse_relation(r) for r in reversed(chain))


def classify_entities(
    g: Graph, chain: tuple[int, ...], r_q: int, side: str = "head"
) -> EntityCategoryCounts:
    """Partition every graph entity into the four chain-vs-relation buckets.

    side="head" compares chain-starting entities with r_q head entities;
    side="tail" compares chain-ending entities with r_q tail entities
    (computed on the inverted chain/relation, valid in augmented graphs).
    """
    if side not in SIDES:
        raise ContractError(f"side must be one of {SIDES}, got {side!r}")
    if side == "tail":
        chain = _inverse_chain(g, chain)
        r_q = g.inverse_relation(r_q)
    e_ap = collect_chain_heads(g, chain)
    e_rq = relation_heads(g, r_q)
    pt = len(e_ap & e_rq)
    po = len(e_ap - e_rq)
    to = len(e_rq - e_ap)
    nc = g.num_entities - pt - po - to
    return EntityCategoryCounts(pt, po, to, nc)


@dataclass
class LogicalAPStore:
    """Per-relation chains that passed both thresholds on the training graph."""

    by_relation: dict[str, list[APStatistics]]
    min_accuracy: float
    min_recall: float
    depth: int
    graph_id: str
    dropped: dict[str, int] = field(default_factory=dict)

    def chains(self, relation: str, side: str) -> set[tuple[str, ...]]:
        return {s.chain for s in self.by_relation.get(relation, ()) if s.side == side}

    def get(self, relation: str, side: str, chain: tuple[str, ...]) -> Optional[APStatistics]:
        for s in self.by_relation.get(relation, ()):
            if s.side == side and s.chain == chain:
                return s
        return None

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            meta = {
                "graph_id": self.graph_id,
                "depth": self.depth,
                "min_accuracy": self.min_accuracy,
                "min_recall": self.min_recall,
                "relations": list(self.by_relation),
                "dropped": self.dropped,
            }
            fh.write(json.dumps(meta, separators=(",", ":")) + "\n")
            for relation in self.by_relation:
                for stats in self.by_relation[relation]:
                    fh.write(json.dumps(stats.to_record(), separators=(",", ":")) + "\n")

    @classmethod
    def load(cls, path) -> "LogicalAPStore":
        with open(path, encoding="utf-8") as fh:
            header = fh.readline()
            if not header.strip():
                raise ValidationError(f"{path}: missing store header")
            meta = json.loads(header)
            store = cls(
                by_relation={r: [] for r in meta["relations"]},
                min_accuracy=meta["min_accuracy"],
                min_recall=meta["min_recall"],
                depth=meta["depth"],
                graph_id=meta["graph_id"],
                dropped=dict(meta.get("dropped", {})),
            )
            for line in fh:
                if not line.strip():
                    continue
                stats = APStatistics.from_record(json.loads(line))
                store.by_relation.setdefault(stats.relation, []).append(stats)
        return store


def _passes(value: Optional[float], threshold: float, required: bool) -> bool:
    if not required:
        return True
    return value is not None and value >= threshold


def build_logical_ap_store(
    g_train: Graph,
    depth: int,
    min_acc: float,
    min_rec: float,
    *,
    require_acc: bool = True,
    require_rec: bool = True,
) -> LogicalAPStore:
    """Mine, score, and filter candidate chains for every base relation.

    Candidate chains come from paths anchored at the heads and tails of
    the relation's own training triples (the triple under inspection and
    its inverse twin are excluded while mining). Chains whose accuracy or
    recall is undefined or below threshold are dropped.
    """
    if not g_train.augmented:
        raise ContractError("store building requires an inverse-augmented graph")
    if not (0.0 <= min_acc <= 1.0 and 0.0 <= min_rec <= 1.0):
        raise ContractError("thresholds must lie in [0, 1]")

    by_relation: dict[str, list[APStatistics]] = {}
    dropped: dict[str, int] = {}
    for rid in g_train.base_relations():
        relation = g_train.relation_surface(rid)
        candidates: dict[tuple[str, tuple[int, ...]], None] = {}
        for h, t in g_train.relation_edges[rid]:
            exclude: Triple = (h, rid, t)
            for p in enumerate_anchoring_paths(g_train, h, "head", depth, exclude):
                candidates.setdefault(("head", p.relations))
            for p in enumerate_anchoring_paths(g_train, t, "tail", depth, exclude):
                candidates.setdefault(("tail", p.relations))
        kept: list[APStatistics] = []
        n_dropped = 0
        for side, chain in candidates:
            counts = classify_entities(g_train, chain, rid, side)
            accuracy, recall = ap_metrics(counts)
            certifiable = accuracy is not None and recall is not None
            if certifiable and _passes(accuracy, min_acc, require_acc) and _passes(recall, min_rec, require_rec):
                kept.append(
                    APStatistics(
                        relation=relation,
                        side=side,
                        chain=tuple(g_train.relation_surface(r) for r in chain),
                        counts=counts,
                        accuracy=accuracy,
                        recall=recall,
                    )
                )
            else:
                n_dropped += 1
        kept.sort(key=lambda s: (s.side, len(s.chain), s.chain))
        by_relation[relation] = kept
        dropped[relation] = n_dropped
    return LogicalAPStore(
        by_relation=by_relation,
        min_accuracy=min_acc,
        min_recall=min_rec,
        depth=depth,
        graph_id=g_train.graph_id,
        dropped=dropped,
    )


def _path_sort_key(g: Graph, p: Path):
    return (
        len(p),
        tuple(g.relation_surface(r) for r in p.relations),
        tuple(g.entity_surface(e) for e in p.entities),
    )


def match_query_aps(
    g_test: Graph,
    query: Triple,
    store: LogicalAPStore,
    budget_l: int,
    rng_seed: int,
    *,
    include_aps: bool = True,
    depth: Optional[int] = None,
) -> list[Path]:
    """Select up to budget_l evidence paths for a query triple.

    All closed paths come first (shortest, then lexicographic, when they
    exceed the budget); remaining slots are filled with anchored paths
    whose chains appear in the store, sampled without replacement.
    An unknown relation yields an empty list: no evidence, not an error.
    """
    if budget_l < 1:
        raise ContractError("budget_l must be >= 1")
    h, rid, t = query
    relation = g_test.relation_surface(rid)
    if relation not in store.by_relation:
        return []
    depth = store.depth if depth is None else depth

    cps = enumerate_closed_paths(g_test, h, t, depth, exclude=query)
    cps.sort(key=lambda p: _path_sort_key(g_test, p))
    selected = cps[:budget_l]
    if not include_aps or len(selected) >= budget_l:
        return selected

    head_chains = store.chains(relation, "head")
    tail_chains = store.chains(relation, "tail")
    candidates: list[Path] = []
    if head_chains:
        for p in enumerate_anchoring_paths(g_test, h, "head", depth, exclude=query):
            if p.end == t:
                continue  # closed path, already covered
            if tuple(g_test.relation_surface(r) for r in p.relations) in head_chains:
                candidates.append(p)
    if tail_chains:
        for p in enumerate_anchoring_paths(g_test, t, "tail", depth, exclude=query):
            if p.start == h:
                continue
            if tuple(g_test.relation_surface(r) for r in p.relations) in tail_chains:
                candidates.append(p)
    candidates.sort(key=lambda p: _path_sort_key(g_test, p))
    slots = budget_l - len(selected)
    if len(candidates) > slots:
        rng = random.Random(rng_seed)
        candidates = rng.sample(candidates, slots)
    selected.extend(candidates)
    return selected
