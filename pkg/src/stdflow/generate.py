"""Seeded random networks and queries for property tests and benchmarks."""

from __future__ import annotations

import random

from .densest import Query
from .errors import QueryError
from .network import TemporalFlowNetwork, from_records


def random_tfn(
    rng: random.Random,
    num_vertices: int,
    num_edges: int,
    max_capacity: int = 10,
    max_timestamp: int | None = None,
) -> TemporalFlowNetwork:
    """Simple digraph with random capacities.

    With ``max_timestamp=None`` every edge gets a distinct timestamp, so no two
    edges at one vertex share a time; otherwise timestamps are drawn from
    ``1..max_timestamp`` and may repeat.
    """
    pairs = [(u, v) for u in range(num_vertices) for v in range(num_vertices) if u != v]
    chosen = rng.sample(pairs, min(num_edges, len(pairs)))
    if max_timestamp is None:
        stamps = rng.sample(range(1, 4 * len(chosen) + 1), len(chosen))
    else:
        stamps = [rng.randint(1, max_timestamp) for _ in chosen]
    return from_records(
        (u, v, rng.randint(1, max_capacity), ts) for (u, v), ts in zip(chosen, stamps)
    )


def synthetic_network(
    rng: random.Random,
    num_vertices: int = 40,
    num_edges: int = 120,
    layers: int = 4,
    motif_density: float = 0.2,
    max_capacity: int = 20,
) -> TemporalFlowNetwork:
    """Layered network where money mostly moves forward in layer and time.

    A ``motif_density`` share of the edges form fan-out/fan-in bursts around a
    hub (one vertex splitting an amount across many accounts that later
    regroup), the shape dense-flow queries are meant to surface.
    """
    layer_of = [v * layers // num_vertices for v in range(num_vertices)]
    by_layer = [[v for v in range(num_vertices) if layer_of[v] == i] for i in range(layers)]
    records: dict[tuple[int, int], tuple[int, int]] = {}
    motif_edges = int(num_edges * motif_density)
    while len(records) < motif_edges and layers >= 3:
        i = rng.randrange(layers - 2)
        hub, sink = rng.choice(by_layer[i]), rng.choice(by_layer[i + 2])
        base = 10 * i + rng.randint(0, 4)
        for mid in rng.sample(by_layer[i + 1], min(3, len(by_layer[i + 1]))):
            amount = rng.randint(1, max_capacity)
            records.setdefault((hub, mid), (amount, base + 1))
            records.setdefault((mid, sink), (amount, base + 5 + rng.randint(0, 4)))
    attempts = 0
    while len(records) < num_edges and attempts < 50 * num_edges:
        attempts += 1
        u = rng.randrange(num_vertices)
        if rng.random() < 0.8 and layer_of[u] + 1 < layers:
            v = rng.choice(by_layer[layer_of[u] + 1])
        else:
            v = rng.randrange(num_vertices)
        if u == v or (u, v) in records:
            continue
        ts = 10 * layer_of[u] + rng.randint(1, 15)
        records[u, v] = (rng.randint(1, max_capacity), ts)
    return from_records((u, v, c, ts) for (u, v), (c, ts) in sorted(records.items()))


def random_query(rng: random.Random, tfn: TemporalFlowNetwork, n: int, k: int | None = None) -> Query:
    """``n/2`` sources with an outgoing edge and ``n/2`` sinks with an incoming edge."""
    if n < 2 or n % 2:
        raise QueryError(f"query size must be an even number >= 2, got {n}")
    half = n // 2
    senders = [tfn.label(v) for v in range(tfn.num_vertices) if tfn.out_edges[v]]
    if len(senders) < half:
        raise QueryError(f"only {len(senders)} vertices can act as sources, need {half}")
    sources = rng.sample(senders, half)
    receivers = [tfn.label(v) for v in range(tfn.num_vertices) if tfn.in_edges[v] and tfn.label(v) not in sources]
    if len(receivers) < half:
        raise QueryError(f"only {len(receivers)} vertices can act as sinks, need {half}")
    sinks = rng.sample(receivers, half)
    return Query(tuple(sources), tuple(sinks), k if k is not None else rng.randint(1, n))
