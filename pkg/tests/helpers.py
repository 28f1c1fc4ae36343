"""Shared fixture loading and random instance generation for the test suite."""

from __future__ import annotations

import random
from pathlib import Path

from stdflow.densest import Query
from stdflow.generate import random_tfn
from stdflow.network import StaticFlowNetwork, TemporalFlowNetwork, ingest_edge_list

DATA = Path(__file__).parent / "data"

# human-readable names for the labels used in the fixture CSVs
NAMES = {
    "static_vs_temporal": {"s": 0, "v1": 1, "v2": 2, "v3": 3, "v4": 4, "v5": 5, "t": 6},
    "regret": {"s": 0, "v1": 1, "v2": 2, "v3": 3, "v4": 4, "v5": 5, "t": 6},
    "two_components": {
        "s1": 1, "s2": 2, "s3": 3, "s4": 4,
        "t1": 5, "t2": 6, "t3": 7, "t4": 8, "t5": 9,
        "a": 10, "b": 11, "c": 12,
    },
    "reduction": {
        "s1": 1, "s2": 2, "t1": 3, "t2": 4,
        "v2": 12, "v3": 13, "v4": 14, "v5": 15, "v6": 16, "v7": 17, "v8": 18,
    },
}

FIXTURES = tuple(NAMES)


def load(name: str) -> TemporalFlowNetwork:
    with open(DATA / f"{name}.csv", encoding="utf-8") as fh:
        return ingest_edge_list(fh)


def two_components_query(k: int = 4) -> Query:
    return Query.from_json((DATA / "two_components.query.json").read_text(), k)


def as_static(tfn: TemporalFlowNetwork) -> StaticFlowNetwork:
    """Drop the timestamps."""
    return StaticFlowNetwork(tfn.num_vertices, [(e.src, e.dst, e.capacity) for e in tfn.edges])


def random_network(seed: int, max_edges: int = 20, repeat_stamps: bool = False) -> TemporalFlowNetwork:
    rng = random.Random(seed)
    n = rng.randint(3, 9)
    m = rng.randint(1, max_edges)
    return random_tfn(rng, n, m, max_capacity=9, max_timestamp=6 if repeat_stamps else None)


def random_instance(seed: int, max_terminals: int = 10) -> tuple[TemporalFlowNetwork, Query]:
    """Small network with a query of at most ``max_terminals`` terminals."""
    rng = random.Random(seed)
    n = rng.randint(6, 12)
    m = rng.randint(n, 2 * n + 6)
    tfn = random_tfn(rng, n, m, max_capacity=9, max_timestamp=rng.choice([None, 8]))
    labels = list(tfn.labels)
    size = rng.randint(2, min(max_terminals, len(labels)))
    chosen = rng.sample(labels, size)
    a = rng.randint(1, size - 1)
    query = Query(tuple(chosen[:a]), tuple(chosen[a:]), rng.randint(1, size))
    return tfn, query


# one entry per acceptance criterion, printed at the end of the session by conftest
ACCEPTANCE: list[str] = []
