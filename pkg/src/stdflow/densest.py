"""Exact S-T densest flow queries.

The terminals are split into groups whose sources only reach sinks of the
same group. Flows of different groups never share an edge, so the best flow
for a given number of terminals is a max-plus combination of per-group
tables, each filled by enumerating the group's subsets.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BudgetExceededError, InfeasibleQueryError, QueryError
from .maxflow import ReachIndex, max_flow_sets
from .network import TemporalFlowNetwork
from .preprocess import Rtfn, compress, reduce, transform

DEFAULT_BUDGET = 2**20

Witness = tuple[tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class Query:
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    k: int

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(sorted(set(self.sources))))
        object.__setattr__(self, "sinks", tuple(sorted(set(self.sinks))))
        if not self.sources or not self.sinks:
            raise QueryError("source and sink sets must be non-empty")
        overlap = set(self.sources) & set(self.sinks)
        if overlap:
            raise QueryError(f"sources and sinks overlap: {sorted(overlap)}")
        if not isinstance(self.k, int) or self.k < 1:
            raise QueryError(f"k must be a positive integer, got {self.k!r}")
        if self.k > self.size:
            raise InfeasibleQueryError(f"k={self.k} exceeds |S|+|T|={self.size}")

    @property
    def size(self) -> int:
        return len(self.sources) + len(self.sinks)

    @classmethod
    def from_json(cls, text: str, k: int | None = None) -> "Query":
        try:
            doc = json.loads(text)
            sources, sinks = doc["sources"], doc["sinks"]
            k = doc["k"] if k is None else k
        except (ValueError, KeyError, TypeError) as exc:
            raise QueryError(f"malformed query: {exc}") from None
        return cls(tuple(sources), tuple(sinks), k)

    def to_json(self) -> str:
        return json.dumps({"sources": list(self.sources), "sinks": list(self.sinks), "k": self.k})


@dataclass(frozen=True)
class WccPair:
    sources: tuple[int, ...]
    sinks: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.sources) + len(self.sinks)


@dataclass(frozen=True)
class WccPartition:
    pairs: tuple[WccPair, ...]
    isolated_sources: tuple[int, ...] = ()
    isolated_sinks: tuple[int, ...] = ()


@dataclass(frozen=True)
class DensestFlowArray:
    """``values[j]`` is the largest flow using exactly ``j`` terminals with both
    sides non-empty; ``witnesses[j]`` is a subset pair reaching it."""

    values: tuple[int, ...]
    witnesses: tuple[Witness | None, ...]
    complete: bool = True

    @property
    def size(self) -> int:
        return len(self.values) - 1

    @classmethod
    def zeros(cls, sources: Sequence[int], sinks: Sequence[int]) -> "DensestFlowArray":
        """Table for terminals that cannot carry flow: all zero, first-``j`` witnesses."""
        sources, sinks = sorted(sources), sorted(sinks)
        order = [(x, 0) for x in sources] + [(x, 1) for x in sinks]
        order.sort()
        witnesses = []
        for j in range(len(order) + 1):
            chosen = order[:j]
            witnesses.append((tuple(x for x, side in chosen if side == 0), tuple(x for x, side in chosen if side == 1)))
        return cls((0,) * (len(order) + 1), tuple(witnesses))


@dataclass(frozen=True)
class StdfAnswer:
    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    value: int
    timed_out: bool = False
    details: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.sources) + len(self.sinks)

    @property
    def density(self) -> Fraction:
        return Fraction(self.value, self.size) if self.size else Fraction(0)

    @property
    def degenerate(self) -> bool:
        return self.value == 0


class FlowEvaluator:
    """Computes MFlow(S', T') for labelled terminal subsets on one static network.

    ``calls`` counts every subset evaluation, including those answered as 0
    without a solver run because a side is empty; ``runs`` counts solver runs.
    """

    def __init__(self, rtfn: Rtfn):
        self.rtfn = rtfn
        self.calls = 0
        self.runs = 0

    def __call__(self, sources: Iterable[int], sinks: Iterable[int]) -> int:
        self.calls += 1
        src = {x for x in (self.rtfn.source_vertex(s) for s in sources) if x is not None}
        snk = {x for x in (self.rtfn.sink_vertex(t) for t in sinks) if x is not None}
        if not src or not snk:
            return 0
        self.runs += 1
        return max_flow_sets(self.rtfn.net, src, snk).value


def _witness_key(w: Witness) -> tuple:
    return (w[0], w[1])


# ---------------------------------------------------------------------------
# decomposition

class _DisjointSets:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def decompose(rtfn: Rtfn, query: Query) -> WccPartition:
    """Group terminals by connected components of the source-to-sink reach graph."""
    index = ReachIndex(rtfn.net)
    S, T = query.sources, query.sinks
    ds = _DisjointSets(len(S) + len(T))
    linked = [False] * (len(S) + len(T))
    for i, s in enumerate(S):
        x = rtfn.source_vertex(s)
        if x is None:
            continue
        for j, t in enumerate(T):
            y = rtfn.sink_vertex(t)
            if y is not None and index.reach(x, y):
                ds.union(i, len(S) + j)
                linked[i] = linked[len(S) + j] = True
    groups: dict[int, tuple[list[int], list[int]]] = {}
    for i, s in enumerate(S):
        if linked[i]:
            groups.setdefault(ds.find(i), ([], []))[0].append(s)
    for j, t in enumerate(T):
        if linked[len(S) + j]:
            groups.setdefault(ds.find(len(S) + j), ([], []))[1].append(t)
    pairs = sorted((WccPair(tuple(a), tuple(b)) for a, b in groups.values()), key=lambda p: (p.sources, p.sinks))
    return WccPartition(
        tuple(pairs),
        tuple(s for i, s in enumerate(S) if not linked[i]),
        tuple(t for j, t in enumerate(T) if not linked[len(S) + j]),
    )


# ---------------------------------------------------------------------------
# per-group tables

def df_exact(
    evaluate: FlowEvaluator,
    pair: WccPair,
    budget: int = DEFAULT_BUDGET,
    deadline: float | None = None,
) -> DensestFlowArray:
    """Fill the table for one group by evaluating every subset pair.

    All ``2**n`` masks are evaluated once, the full set first. Past ``deadline``
    (a ``time.monotonic`` value) the scan stops and the partial table is
    returned with ``complete=False``.
    """
    terms = [(s, 0) for s in pair.sources] + [(t, 1) for t in pair.sinks]
    n = len(terms)
    if 2**n > budget:
        raise BudgetExceededError(f"exact enumeration of {n} terminals needs 2^{n} flows (budget {budget})")
    values = [0] * (n + 1)
    witnesses: list[Witness | None] = [None] * (n + 1)
    full = (1 << n) - 1
    complete = True
    for step, mask in enumerate([full, *range(full)]):
        if deadline is not None and step > 0 and time.monotonic() > deadline:
            complete = False
            break
        src = tuple(x for b, (x, side) in enumerate(terms) if mask >> b & 1 and side == 0)
        snk = tuple(x for b, (x, side) in enumerate(terms) if mask >> b & 1 and side == 1)
        value = evaluate(src, snk)
        size = len(src) + len(snk)
        if size >= 2 and not (src and snk):
            continue
        w = (src, snk)
        if witnesses[size] is None or value > values[size] or (value == values[size] and _witness_key(w) < _witness_key(witnesses[size])):
            values[size] = value
            witnesses[size] = w
    return DensestFlowArray(tuple(values), tuple(witnesses), complete)


# ---------------------------------------------------------------------------
# merging and answers

def _combine(w1: Witness | None, w2: Witness | None) -> Witness | None:
    if w1 is None or w2 is None:
        return None
    return tuple(sorted(w1[0] + w2[0])), tuple(sorted(w1[1] + w2[1]))


def merge_pair(a: DensestFlowArray, b: DensestFlowArray) -> DensestFlowArray:
    """Max-plus convolution of two tables from groups that share no flow."""
    n = a.size + b.size
    values = [-1] * (n + 1)
    witnesses: list[Witness | None] = [None] * (n + 1)
    for i in range(a.size + 1):
        for j in range(b.size + 1):
            total = a.values[i] + b.values[j]
            w = _combine(a.witnesses[i], b.witnesses[j])
            if total > values[i + j] or (total == values[i + j] and witnesses[i + j] is None and w is not None):
                values[i + j] = total
                witnesses[i + j] = w
    return DensestFlowArray(tuple(values), tuple(witnesses), a.complete and b.complete)


def merge(arrays: Sequence[DensestFlowArray]) -> DensestFlowArray:
    """Combine any number of tables by recursive halving."""
    arrays = list(arrays)
    if not arrays:
        return DensestFlowArray((0,), (((), ()),))
    if len(arrays) == 1:
        return arrays[0]
    mid = len(arrays) // 2
    return merge_pair(merge(arrays[:mid]), merge(arrays[mid:]))


def answer(df: DensestFlowArray, k: int) -> StdfAnswer:
    """Densest entry among sizes ``>= k``; ties go to the smaller size."""
    if k < 1:
        raise QueryError(f"k must be positive, got {k}")
    if k > df.size:
        raise InfeasibleQueryError(f"k={k} exceeds the {df.size} available terminals")
    best = None
    for size in range(k, df.size + 1):
        w = df.witnesses[size]
        if w is None:
            continue
        density = Fraction(df.values[size], size)
        if best is None or density > best[0]:
            best = (density, size)
    if best is None:
        raise InfeasibleQueryError(f"no subset pair of size >= {k} was evaluated")
    size = best[1]
    S, T = df.witnesses[size]
    return StdfAnswer(S, T, df.values[size], timed_out=not df.complete)


# ---------------------------------------------------------------------------
# pipeline

def prepare(tfn: TemporalFlowNetwork, query: Query) -> tuple[Rtfn, dict]:
    """reduce, transform and compress for a query; returns sizes of each stage too."""
    reduced = reduce(tfn, query.sources, query.sinks)
    raw = transform(reduced)
    rtfn = compress(raw)
    sizes = {
        "input": [tfn.num_vertices, tfn.num_edges],
        "reduced": [reduced.num_vertices, reduced.num_edges],
        "transformed": [raw.net.num_vertices, raw.net.num_edges],
        "compressed": [rtfn.net.num_vertices, rtfn.net.num_edges],
    }
    return rtfn, sizes


def pad_isolated(df: DensestFlowArray, partition: WccPartition, k: int) -> DensestFlowArray:
    """Append terminals that reach nothing, but only when ``k`` needs them."""
    if k <= df.size:
        return df
    return merge_pair(df, DensestFlowArray.zeros(partition.isolated_sources, partition.isolated_sinks))


def stdf_exact(
    tfn: TemporalFlowNetwork,
    query: Query,
    budget: int = DEFAULT_BUDGET,
    deadline: float | None = None,
    decomposition: bool = True,
) -> StdfAnswer:
    """Exact optimum via decomposition, per-group enumeration and merging.

    With ``decomposition=False`` all terminals are enumerated as one group.
    ``details`` reports the evaluation count, per-group tables and stage sizes.
    """
    rtfn, sizes = prepare(tfn, query)
    if decomposition:
        partition = decompose(rtfn, query)
    else:
        partition = WccPartition((WccPair(query.sources, query.sinks),))
    evaluate = FlowEvaluator(rtfn)
    arrays = [df_exact(evaluate, pair, budget, deadline) for pair in partition.pairs]
    merged = pad_isolated(merge(arrays), partition, query.k)
    result = answer(merged, query.k)
    details = {
        "maxflow_calls": evaluate.calls,
        "maxflow_runs": evaluate.runs,
        "sizes": sizes,
        "per_wcc": [_wcc_report(p, a) for p, a in zip(partition.pairs, arrays)],
        "merged": list(merged.values),
    }
    return StdfAnswer(result.sources, result.sinks, result.value, result.timed_out, details)


def _wcc_report(pair: WccPair, df: DensestFlowArray) -> dict:
    return {"sources": list(pair.sources), "sinks": list(pair.sinks), "df": list(df.values), "complete": df.complete}


def subset_pairs(sources: Sequence[int], sinks: Sequence[int], min_size: int = 2):
    """Every (S', T') with both sides non-empty and ``|S'|+|T'| >= min_size``."""
    for a in range(1, len(sources) + 1):
        for S in combinations(sources, a):
            for b in range(max(1, min_size - a), len(sinks) + 1):
                for T in combinations(sinks, b):
                    yield S, T
