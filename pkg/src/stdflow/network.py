"""Temporal and static flow networks, CSV ingestion, windowing and super terminals.

Vertex ids are dense integers ``0..n-1`` ordered by their external integer
label, so sorting by id and sorting by label agree everywhere.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

from .errors import ParseError, QueryError, ValidationError

INF = math.inf
MAX_CAPACITY = 2**64 - 1
CSV_HEADER = ("src", "dst", "capacity", "timestamp")


def cap_add(a, b):
    """Saturating capacity addition; finite overflow is an error, never a wrap."""
    if a == INF or b == INF:
        return INF
    total = a + b
    if total > MAX_CAPACITY:
        raise ValidationError(f"capacity overflow: {a} + {b}")
    return total


def cap_sub(a, b):
    if a == INF:
        if b == INF:
            raise ValueError("INF - INF is undefined")
        return INF
    if b > a:
        raise ValueError(f"capacity underflow: {a} - {b}")
    return a - b


@dataclass(frozen=True)
class TemporalEdge:
    src: int
    dst: int
    capacity: int
    timestamp: int


class TemporalFlowNetwork:
    """Directed simple graph whose edges carry a finite capacity and a timestamp.

    ``labels[v]`` is the user-facing label of vertex ``v``; labels are strictly
    increasing in ``v``. Instances are treated as immutable.
    """

    def __init__(self, labels: Sequence[int], edges: Sequence[TemporalEdge]):
        self.labels = tuple(labels)
        self.edges = tuple(edges)
        if any(a >= b for a, b in zip(self.labels, self.labels[1:])):
            raise ValidationError("labels must be strictly increasing")
        self._index = {lab: v for v, lab in enumerate(self.labels)}
        n = len(self.labels)
        out_edges: list[list[int]] = [[] for _ in range(n)]
        in_edges: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for i, e in enumerate(self.edges):
            _check_edge(e.src, e.dst, e.capacity, e.timestamp)
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise ValidationError(f"edge {i} references an unknown vertex")
            if (e.src, e.dst) in seen:
                raise ValidationError(f"multi-edge {self.labels[e.src]}->{self.labels[e.dst]}")
            seen.add((e.src, e.dst))
            out_edges[e.src].append(i)
            in_edges[e.dst].append(i)
        self.out_edges = tuple(tuple(x) for x in out_edges)
        self.in_edges = tuple(tuple(x) for x in in_edges)

    @property
    def num_vertices(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def vertex(self, label: int) -> int | None:
        return self._index.get(label)

    def label(self, v: int) -> int:
        return self.labels[v]

    def degree(self, v: int) -> int:
        return len(self.out_edges[v]) + len(self.in_edges[v])

    def touched_vertices(self) -> int:
        return sum(1 for v in range(self.num_vertices) if self.degree(v) > 0)

    def subnetwork(self, edge_ids: Iterable[int], keep: Iterable[int] = ()) -> "TemporalFlowNetwork":
        """Network on the given edges; vertices without a kept edge are dropped
        unless listed in ``keep``."""
        chosen = sorted(set(edge_ids))
        used = set(keep)
        for i in chosen:
            used.add(self.edges[i].src)
            used.add(self.edges[i].dst)
        order = sorted(used)
        remap = {v: j for j, v in enumerate(order)}
        edges = [
            TemporalEdge(remap[e.src], remap[e.dst], e.capacity, e.timestamp)
            for e in (self.edges[i] for i in chosen)
        ]
        return TemporalFlowNetwork([self.labels[v] for v in order], edges)

    def records(self) -> Iterator[tuple[int, int, int, int]]:
        for e in self.edges:
            yield self.labels[e.src], self.labels[e.dst], e.capacity, e.timestamp

    def __repr__(self) -> str:
        return f"TemporalFlowNetwork(|V|={self.num_vertices}, |E|={self.num_edges})"


def _check_edge(src, dst, capacity, timestamp) -> None:
    if src == dst:
        raise ValidationError(f"self-loop on vertex {src}")
    if not isinstance(capacity, int) or capacity < 0:
        raise ValidationError(f"capacity must be a non-negative integer, got {capacity!r}")
    if capacity > MAX_CAPACITY:
        raise ValidationError(f"capacity {capacity} exceeds 64-bit range")
    if not isinstance(timestamp, int) or timestamp < 1:
        raise ValidationError(f"timestamp must be a positive integer, got {timestamp!r}")


def from_records(records: Iterable[tuple[int, int, int, int]]) -> TemporalFlowNetwork:
    """Build a normalized network from ``(src, dst, capacity, timestamp)`` records.

    The first record of each ``(src, dst)`` pair becomes a direct edge. Every
    further record between the same pair is routed through a fresh
    intermediate vertex ``m`` as ``src->m`` and ``m->dst`` with the same
    capacity and timestamp. Fresh labels are allocated above the largest
    input label in record order.
    """
    records = list(records)
    for src, dst, cap, ts in records:
        _check_edge(src, dst, cap, ts)
    next_label = max((max(r[0], r[1]) for r in records), default=-1) + 1
    seen: set[tuple[int, int]] = set()
    rows: list[tuple[int, int, int, int]] = []
    for src, dst, cap, ts in records:
        if (src, dst) in seen:
            mid = next_label
            next_label += 1
            rows.append((src, mid, cap, ts))
            rows.append((mid, dst, cap, ts))
        else:
            seen.add((src, dst))
            rows.append((src, dst, cap, ts))
    labels = sorted({r[0] for r in rows} | {r[1] for r in rows})
    index = {lab: v for v, lab in enumerate(labels)}
    edges = [TemporalEdge(index[s], index[d], c, t) for s, d, c, t in rows]
    return TemporalFlowNetwork(labels, edges)


def ingest_edge_list(stream: TextIO | str) -> TemporalFlowNetwork:
    """Parse a ``src,dst,capacity,timestamp`` CSV (with header) into a network."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.reader(stream)
    records = []
    header_seen = False
    for lineno, row in enumerate(reader, start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        cells = [cell.strip() for cell in row]
        if not header_seen:
            header_seen = True
            if tuple(c.lower() for c in cells) == CSV_HEADER:
                continue
        if len(cells) != 4:
            raise ParseError(f"expected 4 fields, got {len(cells)}", lineno)
        try:
            src, dst, cap, ts = (int(c) for c in cells)
        except ValueError:
            raise ParseError(f"non-integer field in {row!r}", lineno) from None
        try:
            _check_edge(src, dst, cap, ts)
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        records.append((src, dst, cap, ts))
    return from_records(records)


def to_csv(tfn: TemporalFlowNetwork) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(tfn.records())
    return buf.getvalue()


def window(tfn: TemporalFlowNetwork, start: int, end: int) -> TemporalFlowNetwork:
    """Restrict to edges with ``start <= timestamp <= end``; isolated vertices are dropped."""
    if start > end:
        raise ValueError(f"empty window [{start}, {end}]")
    keep = [i for i, e in enumerate(tfn.edges) if start <= e.timestamp <= end]
    return tfn.subnetwork(keep)


class StaticFlowNetwork:
    """Directed network with capacities that may be ``INF``.

    Edge ``i`` goes ``tails[i] -> heads[i]`` with capacity ``caps[i]``.
    Parallel edges are allowed here; self-loops are not.
    """

    def __init__(self, num_vertices: int, edges: Iterable[tuple[int, int, float]]):
        self.num_vertices = num_vertices
        tails, heads, caps = [], [], []
        out_edges: list[list[int]] = [[] for _ in range(num_vertices)]
        in_edges: list[list[int]] = [[] for _ in range(num_vertices)]
        for i, (u, v, c) in enumerate(edges):
            if u == v:
                raise ValidationError(f"self-loop on vertex {u}")
            if c != INF and (c < 0 or c != int(c)):
                raise ValidationError(f"bad capacity {c!r}")
            tails.append(u)
            heads.append(v)
            caps.append(c if c == INF else int(c))
            out_edges[u].append(i)
            in_edges[v].append(i)
        self.tails = tuple(tails)
        self.heads = tuple(heads)
        self.caps = tuple(caps)
        self.out_edges = tuple(tuple(x) for x in out_edges)
        self.in_edges = tuple(tuple(x) for x in in_edges)

    @property
    def num_edges(self) -> int:
        return len(self.tails)

    def edges(self) -> Iterator[tuple[int, int, float]]:
        return zip(self.tails, self.heads, self.caps)

    def successors(self, v: int) -> Iterator[int]:
        return (self.heads[i] for i in self.out_edges[v])

    def predecessors(self, v: int) -> Iterator[int]:
        return (self.tails[i] for i in self.in_edges[v])

    def __repr__(self) -> str:
        return f"StaticFlowNetwork(|V|={self.num_vertices}, |E|={self.num_edges})"


@dataclass(frozen=True)
class Flow:
    """Per-edge integral flow together with its value."""

    value: int
    edge_flow: tuple[int, ...]

    def nonzero(self) -> Iterator[tuple[int, int]]:
        return ((i, f) for i, f in enumerate(self.edge_flow) if f)


def flow_violations(net: StaticFlowNetwork, flow: Flow, sources: Iterable[int], sinks: Iterable[int]) -> list[str]:
    """Check capacity and conservation constraints; returns human-readable violations."""
    sources, sinks = set(sources), set(sinks)
    problems = []
    if len(flow.edge_flow) != net.num_edges:
        return [f"flow covers {len(flow.edge_flow)} of {net.num_edges} edges"]
    balance = [0] * net.num_vertices
    for i, (u, v, c) in enumerate(net.edges()):
        f = flow.edge_flow[i]
        if f < 0 or f > c:
            problems.append(f"edge {i} ({u}->{v}) flow {f} outside [0, {c}]")
        balance[u] -= f
        balance[v] += f
    for v, b in enumerate(balance):
        if b and v not in sources and v not in sinks:
            problems.append(f"conservation broken at {v} (net {b})")
    value = -sum(balance[v] for v in sources)
    if value != flow.value:
        problems.append(f"value {flow.value} != net source outflow {value}")
    return problems


def add_super_terminals(net: StaticFlowNetwork, sources: Iterable[int], sinks: Iterable[int]) -> tuple[StaticFlowNetwork, int, int]:
    """Append a super source wired to every source and a super sink fed by every sink."""
    sources, sinks = sorted(set(sources)), sorted(set(sinks))
    if not sources or not sinks:
        raise QueryError("source and sink sets must be non-empty")
    if set(sources) & set(sinks):
        raise QueryError(f"sources and sinks overlap: {sorted(set(sources) & set(sinks))}")
    n = net.num_vertices
    for v in (*sources, *sinks):
        if not 0 <= v < n:
            raise QueryError(f"vertex {v} out of range")
    s, t = n, n + 1
    edges = list(net.edges())
    edges += [(s, v, INF) for v in sources]
    edges += [(v, t, INF) for v in sinks]
    return StaticFlowNetwork(n + 2, edges), s, t
