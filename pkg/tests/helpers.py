import random

from anchorpath.graph import Graph

# Canonical toy graph used across tests: constructed so chain (p, q) for
# relation r has PT={A}, PO={B}, TO={D}.
T1_TRIPLES = [
    ("A", "p", "X"),
    ("X", "q", "C"),
    ("A", "r", "C"),
    ("B", "p", "X"),
    ("D", "r", "E"),
    ("D", "s", "E"),
    ("E", "s", "C"),
]


def random_graph(rng: random.Random, max_entities: int = 30, max_triples: int = 120,
                 max_relations: int = 6, allow_self_loops: bool = False) -> Graph:
    n_ent = rng.randint(3, max_entities)
    n_rel = rng.randint(1, max_relations)
    n_tri = rng.randint(2, max_triples)
    entities = [f"e{i}" for i in range(n_ent)]
    relations = [f"r{i}" for i in range(n_rel)]
    rows = []
    for _ in range(n_tri):
        h = rng.choice(entities)
        t = rng.choice(entities)
        if not allow_self_loops and h == t:
            continue
        rows.append((h, rng.choice(relations), t))
    if not rows:
        rows.append((entities[0], relations[0], entities[1]))
    return Graph(rows)


# -- independent brute-force oracles (scan the raw triple list, no indexes) --


def brute_force_paths_from(triples, start, max_depth):
    """All simple paths (entity tuple, relation tuple) of length 1..max_depth
    starting at `start`, by scanning the flat triple list at every step."""
    results = []

    def extend(ents, rels):
        if len(rels) >= max_depth:
            return
        for h, r, t in triples:
            if h == ents[-1] and t not in ents:
                results.append((ents + (t,), rels + (r,)))
                extend(ents + (t,), rels + (r,))

    extend((start,), ())
    return set(results)


def brute_force_all_paths(triples, entities, max_depth):
    out = set()
    for e in entities:
        out |= brute_force_paths_from(triples, e, max_depth)
    return out


def brute_force_chain_heads(triples, entities, chain):
    """Entities starting a simple path matching `chain` exactly."""
    heads = set()
    for e in entities:
        for ents, rels in brute_force_paths_from(triples, e, len(chain)):
            if rels == chain:
                heads.add(e)
                break
    return heads
