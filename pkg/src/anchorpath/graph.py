"""Immutable triple store with interning, adjacency indexes, and inverse augmentation.

Entities and relations are interned to integer handles per graph; all other
modules operate on handles and resolve surfaces through the owning graph.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import (
    AlreadyAugmentedError,
    EmptyGraphError,
    ParseError,
    UnknownEntityError,
    UnknownRelationError,
)

# Reserved suffix marking an inverse relation surface. Input files must not
# contain it; augment_inverses is the only producer.
INVERSE_MARKER = "^-1"

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class GraphStats:
    num_relations: int
    num_entities: int
    num_triples: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "relations": self.num_relations,
                "entities": self.num_entities,
                "triples": self.num_triples,
            }
        )


class Graph:
    """A deduplicated multigraph of (head, relation, tail) triples.

    Immutable after construction; safe for concurrent reads. Iteration
    order of triples and adjacency lists follows insertion order, which
    makes every downstream enumeration deterministic.
    """

    def __init__(self, surface_triples: Iterable[tuple[str, str, str]], *, _augmented: bool = False):
        self._ent_intern: dict[str, int] = {}
        self._ent_surfaces: list[str] = []
        self._rel_intern: dict[str, int] = {}
        self._rel_surfaces: list[str] = []
        self._rel_inverse: list[Optional[int]] = []
        self.triples: list[Triple] = []
        self._triple_set: set[Triple] = set()
        self.augmented = _augmented

        for h, r, t in surface_triples:
            triple = (self._intern_entity(h), self._intern_relation(r), self._intern_entity(t))
            if triple not in self._triple_set:
                self._triple_set.add(triple)
                self.triples.append(triple)

        if _augmented:
            self._link_inverses()
        self._build_indexes()
        self.graph_id = self._fingerprint()

    # -- construction helpers -------------------------------------------------

    def _intern_entity(self, surface: str) -> int:
        eid = self._ent_intern.get(surface)
        if eid is None:
            eid = len(self._ent_surfaces)
            self._ent_intern[surface] = eid
            self._ent_surfaces.append(surface)
        return eid

    def _intern_relation(self, surface: str) -> int:
        rid = self._rel_intern.get(surface)
        if rid is None:
            rid = len(self._rel_surfaces)
            self._rel_intern[surface] = rid
            self._rel_surfaces.append(surface)
            self._rel_inverse.append(None)
        return rid

    def _link_inverses(self) -> None:
        for surface, rid in self._rel_intern.items():
            if surface.endswith(INVERSE_MARKER):
                base = self._rel_intern[surface[: -len(INVERSE_MARKER)]]
                self._rel_inverse[rid] = base
                self._rel_inverse[base] = rid

    def _build_indexes(self) -> None:
        self.out_index: dict[int, list[tuple[int, int]]] = {e: [] for e in range(len(self._ent_surfaces))}
        self.in_index: dict[int, list[tuple[int, int]]] = {e: [] for e in range(len(self._ent_surfaces))}
        self.relation_heads_index: dict[int, set[int]] = {r: set() for r in range(len(self._rel_surfaces))}
        self.relation_edges: dict[int, list[tuple[int, int]]] = {r: [] for r in range(len(self._rel_surfaces))}
        for h, r, t in self.triples:
            self.out_index[h].append((r, t))
            self.in_index[t].append((r, h))
            self.relation_heads_index[r].add(h)
            self.relation_edges[r].append((h, t))

    def _fingerprint(self) -> str:
        digest = hashlib.sha256()
        for h, r, t in self.triples:
            line = f"{self._ent_surfaces[h]}\t{self._rel_surfaces[r]}\t{self._ent_surfaces[t]}\n"
            digest.update(line.encode("utf-8"))
        return digest.hexdigest()[:16]

    # -- lookups --------------------------------------------------------------

    def entity_id(self, surface: str) -> int:
        try:
            return self._ent_intern[surface]
        except KeyError:
            raise UnknownEntityError(surface) from None

    def entity_surface(self, eid: int) -> str:
        try:
            return self._ent_surfaces[eid]
        except IndexError:
            raise UnknownEntityError(eid) from None

    def relation_id(self, surface: str) -> int:
        try:
            return self._rel_intern[surface]
        except KeyError:
            raise UnknownRelationError(surface) from None

    def relation_surface(self, rid: int) -> str:
        try:
            return self._rel_surfaces[rid]
        except IndexError:
            raise UnknownRelationError(rid) from None

    def inverse_relation(self, rid: int) -> int:
        if not 0 <= rid < len(self._rel_surfaces):
            raise UnknownRelationError(rid)
        inv = self._rel_inverse[rid]
        if inv is None:
            raise UnknownRelationError(f"{self._rel_surfaces[rid]} has no inverse (graph not augmented)")
        return inv

    def is_inverse(self, rid: int) -> bool:
        return self.relation_surface(rid).endswith(INVERSE_MARKER)

    def has_entity(self, surface: str) -> bool:
        return surface in self._ent_intern

    def has_relation(self, surface: str) -> bool:
        return surface in self._rel_intern

    def has_triple(self, triple: Triple) -> bool:
        return triple in self._triple_set

    @property
    def num_entities(self) -> int:
        return len(self._ent_surfaces)

    @property
    def num_relations(self) -> int:
        return len(self._rel_surfaces)

    def entities(self) -> range:
        return range(len(self._ent_surfaces))

    def base_relations(self) -> list[int]:
        """Relation handles excluding inverse-marked ones, in interning order."""
        return [r for r in range(len(self._rel_surfaces)) if not self._rel_surfaces[r].endswith(INVERSE_MARKER)]

    def surface_triples(self) -> Iterator[tuple[str, str, str]]:
        for h, r, t in self.triples:
            yield self._ent_surfaces[h], self._rel_surfaces[r], self._ent_surfaces[t]


def load_triples(path) -> Graph:
    """Load a TAB-separated triple file into a deduplicated graph.

    Each nonempty line must be ``head<TAB>relation<TAB>tail``. Relations
    carrying the reserved inverse marker are rejected so an augmented
    graph can never be silently double-augmented.
    """
    rows: list[tuple[str, str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ParseError(path, lineno, f"expected 3 TAB-separated fields, got {len(fields)}")
            h, r, t = fields
            if r.endswith(INVERSE_MARKER):
                raise ParseError(path, lineno, f"relation {r!r} carries the reserved inverse marker")
            rows.append((h, r, t))
    if not rows:
        raise EmptyGraphError(f"{path} contains no triples")
    return Graph(rows)


def save_triples(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for h, r, t in g.surface_triples():
            fh.write(f"{h}\t{r}\t{t}\n")


def augment_inverses(g: Graph) -> Graph:
    """Return a new graph with an inverse triple and relation for every base one."""
    if g.augmented or any(g.is_inverse(r) for r in range(g.num_relations)):
        raise AlreadyAugmentedError("graph already carries inverse relations")
    rows = list(g.surface_triples())
    rows.extend((t, r + INVERSE_MARKER, h) for h, r, t in g.surface_triples())
    return Graph(rows, _augmented=True)


def relation_heads(g: Graph, rid: int) -> set[int]:
    """All entities appearing as the head of a triple with relation ``rid``."""
    if not 0 <= rid < g.num_relations:
        raise UnknownRelationError(rid)
    return set(g.relation_heads_index[rid])


def graph_stats(g: Graph) -> GraphStats:
    return GraphStats(g.num_relations, g.num_entities, len(g.triples))
