"""Simple-path enumeration, relation chains, and path classification.

All enumeration is exhaustive depth-bounded DFS over the adjacency
indexes, visiting edges in insertion order, so identical graphs produce
identical path orderings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import ContractError, UnknownEntityError, UnknownRelationError
from .graph import Graph, Triple


@dataclass(frozen=True)
class Path:
    """A concrete walk: n relations over n+1 pairwise-distinct entities."""

    entities: tuple[int, ...]
    relations: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.relations)

    @property
    def start(self) -> int:
        return self.entities[0]

    @property
    def end(self) -> int:
        return self.entities[-1]

    def to_json(self, g: Graph) -> str:
        return json.dumps(
            {
                "entities": [g.entity_surface(e) for e in self.entities],
                "relations": [g.relation_surface(r) for r in self.relations],
            }
        )


RelationChain = tuple[int, ...]


class PathCategory(Enum):
    NO_CONTACT = "no_contact"
    HEAD_AP = "head_ap"
    TAIL_AP = "tail_ap"
    CLOSED_PATH = "closed_path"
    CONCATENATION = "concatenation"


def _excluded_edges(g: Graph, exclude: Optional[Triple]) -> frozenset[Triple]:
    if exclude is None:
        return frozenset()
    h, r, t = exclude
    edges = {exclude}
    if g.augmented:
        edges.add((t, g.inverse_relation(r), h))
    return frozenset(edges)


def _check_entity(g: Graph, eid: int) -> None:
    if not 0 <= eid < g.num_entities:
        raise UnknownEntityError(eid)


def enumerate_anchoring_paths(
    g: Graph,
    anchor: int,
    side: str,
    max_depth: int,
    exclude: Optional[Triple] = None,
) -> list[Path]:
    """All simple paths of length 1..max_depth anchored at one entity.

    side="head": paths starting at the anchor. side="tail": paths ending
    at the anchor, found by walking the in-index backwards and reversing.
    """
    _check_entity(g, anchor)
    if max_depth < 1:
        raise ContractError("max_depth must be >= 1")
    if side not in ("head", "tail"):
        raise ContractError(f"side must be 'head' or 'tail', got {side!r}")
    banned = _excluded_edges(g, exclude)

    results: list[Path] = []
    ents: list[int] = [anchor]
    rels: list[int] = []
    visited = {anchor}

    index = g.out_index if side == "head" else g.in_index

    def walk(node: int) -> None:
        for rel, nbr in index[node]:
            edge = (node, rel, nbr) if side == "head" else (nbr, rel, node)
            if nbr in visited or edge in banned:
                continue
            ents.append(nbr)
            rels.append(rel)
            visited.add(nbr)
            if side == "head":
                results.append(Path(tuple(ents), tuple(rels)))
            else:
                results.append(Path(tuple(reversed(ents)), tuple(reversed(rels))))
            if len(rels) < max_depth:
                walk(nbr)
            visited.discard(nbr)
            ents.pop()
            rels.pop()

    walk(anchor)
    return results


def enumerate_closed_paths(
    g: Graph,
    h: int,
    t: int,
    max_depth: int,
    exclude: Optional[Triple] = None,
) -> list[Path]:
    """All simple paths from h to t of length <= max_depth."""
    _check_entity(g, h)
    _check_entity(g, t)
    if max_depth < 1:
        raise ContractError("max_depth must be >= 1")
    banned = _excluded_edges(g, exclude)

    results: list[Path] = []
    ents: list[int] = [h]
    rels: list[int] = []
    visited = {h}

    def walk(node: int) -> None:
        for rel, nbr in g.out_index[node]:
            if nbr in visited or (node, rel, nbr) in banned:
                continue
            ents.append(nbr)
            rels.append(rel)
            if nbr == t:
                results.append(Path(tuple(ents), tuple(rels)))
            elif len(rels) < max_depth:
                visited.add(nbr)
                walk(nbr)
                visited.discard(nbr)
            ents.pop()
            rels.pop()

    walk(h)
    return results


def relation_chain(p: Path) -> RelationChain:
    """The path's relation sequence with entities disregarded."""
    return p.relations


def classify_path(p: Path, h: int, t: int) -> PathCategory:
    """Assign a path exactly one category relative to the query pair (h, t).

    Anchor occurrences are positions whose entity is h or t. None: no
    contact. Both endpoints: closed. One endpoint only: anchored at the
    start (head side) or the end (tail side). Anything else is a
    concatenation of anchored segments.
    """
    n = len(p.entities) - 1
    hits = [i for i, e in enumerate(p.entities) if e == h or e == t]
    if not hits:
        return PathCategory.NO_CONTACT
    if hits == [0, n]:
        return PathCategory.CLOSED_PATH
    if hits == [0]:
        return PathCategory.HEAD_AP
    if hits == [n]:
        return PathCategory.TAIL_AP
    return PathCategory.CONCATENATION


def decompose_concatenated(p: Path, h: int, t: int) -> list[Path]:
    """Split a concatenation at every occurrence of h or t.

    The resulting sub-paths concatenate back to p and each one is
    anchored at its start, its end, or both.
    """
    if classify_path(p, h, t) is not PathCategory.CONCATENATION:
        raise ContractError("decompose_concatenated requires a Concatenation path")
    n = len(p.entities) - 1
    hits = [i for i, e in enumerate(p.entities) if e == h or e == t]
    cuts = sorted({0, n, *hits})
    parts = []
    for a, b in zip(cuts, cuts[1:]):
        parts.append(Path(p.entities[a : b + 1], p.relations[a:b]))
    return parts


def chain_endpoints(g: Graph, start: int, chain: RelationChain) -> set[int]:
    """Entities reachable from start via a simple path matching the chain exactly."""
    _check_entity(g, start)
    if not chain:
        raise ContractError("chain must be nonempty")
    for rid in chain:
        if not 0 <= rid < g.num_relations:
            raise UnknownRelationError(rid)

    ends: set[int] = set()
    visited = {start}

    def walk(node: int, pos: int) -> None:
        want = chain[pos]
        for rel, nbr in g.out_index[node]:
            if rel != want or nbr in visited:
                continue
            if pos + 1 == len(chain):
                ends.add(nbr)
            else:
                visited.add(nbr)
                walk(nbr, pos + 1)
                visited.discard(nbr)

    walk(start, 0)
    return ends


def chain_satisfiable(g: Graph, start: int, chain: RelationChain) -> bool:
    """Whether at least one simple path from start matches the chain (early exit)."""
    _check_entity(g, start)
    visited = {start}

    def walk(node: int, pos: int) -> bool:
        want = chain[pos]
        for rel, nbr in g.out_index[node]:
            if rel != want or nbr in visited:
                continue
            if pos + 1 == len(chain):
                return True
            visited.add(nbr)
            hit = walk(nbr, pos + 1)
            visited.discard(nbr)
            if hit:
                return True
        return False

    return walk(start, 0)
