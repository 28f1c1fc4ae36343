"""Static maximum flow (level graph + blocking flow), residual networks, reachability,
and maximum temporal flow through the time-expanded network.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .errors import QueryError
from .network import INF, Flow, StaticFlowNetwork, TemporalFlowNetwork, add_super_terminals
from .preprocess import Rtfn, compress, reduce, transform


class _Dinic:
    # Arc 2i is edge i forward, arc 2i+1 its reverse; adjacency lists are in
    # ascending arc order so augmentations are reproducible.
    def __init__(self, net: StaticFlowNetwork):
        self.n = net.num_vertices
        m = net.num_edges
        self.head = [0] * (2 * m)
        self.res = [0] * (2 * m)
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for i, (u, v, c) in enumerate(net.edges()):
            self.head[2 * i] = v
            self.head[2 * i + 1] = u
            self.res[2 * i] = c
            adj[u].append(2 * i)
            adj[v].append(2 * i + 1)
        self.adj = [sorted(a) for a in adj]

    def _levels(self, s: int, t: int) -> list[int] | None:
        level = [-1] * self.n
        level[s] = 0
        frontier = [s]
        while frontier and level[t] < 0:
            nxt = []
            for v in frontier:
                for a in self.adj[v]:
                    w = self.head[a]
                    if self.res[a] > 0 and level[w] < 0:
                        level[w] = level[v] + 1
                        nxt.append(w)
            frontier = nxt
        return level if level[t] >= 0 else None

    def _blocking(self, s: int, t: int, level: list[int]) -> int:
        head, res, adj = self.head, self.res, self.adj
        it = [0] * self.n
        total = 0
        path: list[int] = []
        v = s
        while True:
            if v == t:
                b = min(res[a] for a in path)
                if b == INF:
                    raise AssertionError("augmenting path of unbounded capacity")
                for a in path:
                    res[a] -= b
                    res[a ^ 1] += b
                total += b
                # resume from the tail of the first saturated arc
                for j, a in enumerate(path):
                    if res[a] == 0:
                        del path[j:]
                        break
                v = head[path[-1]] if path else s
                continue
            arcs = adj[v]
            while it[v] < len(arcs):
                a = arcs[it[v]]
                w = head[a]
                if res[a] > 0 and level[w] == level[v] + 1:
                    break
                it[v] += 1
            else:
                if not path:
                    return total
                level[v] = -1
                a = path.pop()
                v = head[a ^ 1]
                it[v] += 1
                continue
            path.append(arcs[it[v]])
            v = head[arcs[it[v]]]

    def run(self, s: int, t: int) -> int:
        total = 0
        while (level := self._levels(s, t)) is not None:
            total += self._blocking(s, t, level)
        return total

    def edge_flow(self) -> tuple[int, ...]:
        return tuple(self.res[2 * i + 1] for i in range(len(self.res) // 2))


def _check_terminal(net: StaticFlowNetwork, v: int) -> None:
    if not 0 <= v < net.num_vertices:
        raise ValueError(f"vertex {v} out of range")


def max_flow(net: StaticFlowNetwork, s: int, t: int) -> Flow:
    """Integral maximum ``s``-``t`` flow."""
    if s == t:
        raise ValueError("source and sink must differ")
    _check_terminal(net, s)
    _check_terminal(net, t)
    solver = _Dinic(net)
    value = solver.run(s, t)
    return Flow(value, solver.edge_flow())


def max_flow_value(net: StaticFlowNetwork, s: int, t: int) -> int:
    return max_flow(net, s, t).value


def max_flow_sets(net: StaticFlowNetwork, sources: Iterable[int], sinks: Iterable[int]) -> Flow:
    """Maximum flow from a vertex set to a vertex set, reported on ``net``'s own edges."""
    ext, s, t = add_super_terminals(net, sources, sinks)
    solver = _Dinic(ext)
    value = solver.run(s, t)
    return Flow(value, solver.edge_flow()[: net.num_edges])


@dataclass(frozen=True)
class ResidualArc:
    tail: int
    head: int
    residual: float
    edge: int
    forward: bool


class ResidualNetwork:
    """Residual capacities of ``net`` under ``flow``; zero-capacity arcs are omitted."""

    def __init__(self, net: StaticFlowNetwork, flow: Flow):
        self.num_vertices = net.num_vertices
        self.arcs: list[ResidualArc] = []
        self.out: list[list[int]] = [[] for _ in range(net.num_vertices)]
        for i, (u, v, c) in enumerate(net.edges()):
            f = flow.edge_flow[i]
            if c - f > 0:
                self._add(ResidualArc(u, v, c - f, i, True))
            if f > 0:
                self._add(ResidualArc(v, u, f, i, False))

    def _add(self, arc: ResidualArc) -> None:
        self.out[arc.tail].append(len(self.arcs))
        self.arcs.append(arc)

    def reachable_from(self, s: int) -> set[int]:
        seen = {s}
        stack = [s]
        while stack:
            v = stack.pop()
            for a in self.out[v]:
                w = self.arcs[a].head
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen


def min_cut(net: StaticFlowNetwork, s: int, t: int) -> tuple[int, set[int]]:
    """Min cut value and the source side, read off the final residual network."""
    flow = max_flow(net, s, t)
    side = ResidualNetwork(net, flow).reachable_from(s)
    return flow.value, side


class ReachIndex:
    """Forward reachability with one memoized visited set per queried source."""

    def __init__(self, net: StaticFlowNetwork):
        self.net = net
        self._cache: dict[int, frozenset[int]] = {}

    def reachable(self, s: int) -> frozenset[int]:
        hit = self._cache.get(s)
        if hit is None:
            seen = {s}
            stack = [s]
            while stack:
                v = stack.pop()
                for w in self.net.successors(v):
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            hit = self._cache[s] = frozenset(seen)
        return hit

    def reach(self, s: int, t: int) -> bool:
        return t in self.reachable(s)


def reach(net: StaticFlowNetwork, s: int, t: int) -> bool:
    _check_terminal(net, s)
    _check_terminal(net, t)
    return ReachIndex(net).reach(s, t)


# ---------------------------------------------------------------------------
# temporal flows

@dataclass(frozen=True)
class TemporalMaxFlow:
    value: int
    rtfn: Rtfn
    flow: Flow
    source: int | None
    sink: int | None


def max_temporal_flow(tfn: TemporalFlowNetwork, s: int, t: int, *, do_reduce: bool = True, do_compress: bool = True) -> TemporalMaxFlow:
    """Maximum temporal flow between labelled vertices via reduce, transform, compress."""
    if s == t:
        raise QueryError("source and sink must differ")
    work = reduce(tfn, [s], [t]) if do_reduce else tfn
    rtfn = transform(work)
    if do_compress:
        rtfn = compress(rtfn)
    src, snk = rtfn.source_vertex(s), rtfn.sink_vertex(t)
    if src is None or snk is None or src == snk:
        return TemporalMaxFlow(0, rtfn, Flow(0, (0,) * rtfn.net.num_edges), src, snk)
    flow = max_flow(rtfn.net, src, snk)
    return TemporalMaxFlow(flow.value, rtfn, flow, src, snk)


def naive_augmenting_paths(tfn: TemporalFlowNetwork, s: int, t: int) -> list[tuple[tuple[int, ...], int]]:
    """Greedy temporal augmentation without flow reversal.

    Repeatedly picks a widest path whose timestamps never decrease and
    saturates it. Returns ``(edge ids, amount)`` per augmentation. This is
    the baseline that ignores the possibility of rerouting earlier flow.
    """
    if s == t:
        raise QueryError("source and sink must differ")
    src, snk = tfn.vertex(s), tfn.vertex(t)
    if src is None or snk is None:
        return []
    residual = [e.capacity for e in tfn.edges]
    paths = []
    while True:
        found = _widest_temporal_path(tfn, residual, src, snk)
        if found is None:
            return paths
        edges, width = found
        for i in edges:
            residual[i] -= width
        paths.append((edges, width))


def _widest_temporal_path(tfn, residual, src, snk):
    # Max-bottleneck search over states (vertex, arrival time).
    start = (src, 0)
    best = {start: INF}
    parent: dict[tuple[int, int], tuple[tuple[int, int], int]] = {}
    heap = [(-INF, 0, src)]
    done = set()
    while heap:
        negw, arrival, v = heapq.heappop(heap)
        state = (v, arrival)
        if state in done:
            continue
        done.add(state)
        if v == snk:
            edges = []
            while state != start:
                state, e = parent[state]
                edges.append(e)
            return tuple(reversed(edges)), -negw
        for i in tfn.out_edges[v]:
            e = tfn.edges[i]
            if residual[i] <= 0 or e.timestamp < arrival:
                continue
            nxt = (e.dst, e.timestamp)
            width = min(-negw, residual[i])
            if nxt not in done and width > best.get(nxt, 0):
                best[nxt] = width
                parent[nxt] = (state, i)
                heapq.heappush(heap, (-width, e.timestamp, e.dst))
    return None


def naive_temporal_max_flow(tfn: TemporalFlowNetwork, s: int, t: int) -> int:
    return sum(w for _, w in naive_augmenting_paths(tfn, s, t))


def regret_disabling_vertices(tfn: TemporalFlowNetwork) -> list[int]:
    """Labels of vertices whose in/out timestamps interleave as in < out < in < out.

    Such a vertex can force greedy augmentation without rerouting into a
    suboptimal commitment.
    """
    found = []
    for v in range(tfn.num_vertices):
        ins = sorted({tfn.edges[i].timestamp for i in tfn.in_edges[v]})
        outs = sorted({tfn.edges[i].timestamp for i in tfn.out_edges[v]})
        hit = any(
            a < c < b < d
            for a in ins for b in ins for c in outs for d in outs
        )
        if hit:
            found.append(tfn.label(v))
    return found
