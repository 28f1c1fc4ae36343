"""Query-relative reduction, time-expanded transformation and flow-preserving compression.

The transformed network gives every vertex one copy per distinct timestamp of
its incident edges. Each temporal edge becomes a "horizontal" edge between the
copies at its timestamp, and consecutive copies of one vertex are chained by
"vertical" edges of infinite capacity. Ordinary max-flow on this DAG from the
earliest source copy to the latest sink copy equals the maximum temporal flow.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import QueryError
from .network import INF, StaticFlowNetwork, TemporalFlowNetwork, cap_add


class Color(enum.Enum):
    FLOW_OUT = "flow-out"
    FLOW_IN = "flow-in"
    FLOW_CROSSING = "flow-crossing"


@dataclass(frozen=True)
class Rtfn:
    """Time-expanded static network plus the bookkeeping that ties it to its TFN.

    ``members[x]`` lists the ``(vertex, timestamp)`` copies folded into static
    vertex ``x`` (a single copy before compression). ``copies[v]`` lists the
    static vertices holding copies of original vertex ``v`` in time order.
    ``tr[e]`` is the static edge carrying temporal edge ``e`` (``None`` if it was
    absorbed by a merge) and ``tr_inv[x]`` the temporal edges carried by static
    edge ``x`` (empty for vertical edges).
    """

    net: StaticFlowNetwork
    tfn: TemporalFlowNetwork
    members: tuple[tuple[tuple[int, int], ...], ...]
    copies: tuple[tuple[int, ...], ...]
    tr: tuple[int | None, ...]
    tr_inv: tuple[tuple[int, ...], ...]
    compressed: bool = False

    def earliest_copy(self, v: int) -> int | None:
        c = self.copies[v]
        return c[0] if c else None

    def latest_copy(self, v: int) -> int | None:
        c = self.copies[v]
        return c[-1] if c else None

    def source_vertex(self, label: int) -> int | None:
        """Static vertex from which flow of the labelled source starts."""
        v = self.tfn.vertex(label)
        return None if v is None else self.earliest_copy(v)

    def sink_vertex(self, label: int) -> int | None:
        """Static vertex into which flow of the labelled sink ends."""
        v = self.tfn.vertex(label)
        return None if v is None else self.latest_copy(v)

    def is_horizontal(self, x: int) -> bool:
        return bool(self.tr_inv[x])

    def describe_vertex(self, x: int) -> str:
        return "+".join(f"{self.tfn.label(v)}@{ts}" for v, ts in self.members[x])


# ---------------------------------------------------------------------------
# reduction

def _resolve(tfn: TemporalFlowNetwork, labels: Iterable[int]) -> set[int]:
    return {v for v in (tfn.vertex(x) for x in labels) if v is not None}


def _validate_terminals(sources, sinks) -> tuple[set, set]:
    sources, sinks = set(sources), set(sinks)
    if not sources or not sinks:
        raise QueryError("source and sink sets must be non-empty")
    if sources & sinks:
        raise QueryError(f"sources and sinks overlap: {sorted(sources & sinks)}")
    return sources, sinks


def reduce(tfn: TemporalFlowNetwork, sources: Iterable[int], sinks: Iterable[int]) -> TemporalFlowNetwork:
    """Drop edges and vertices that cannot carry temporal flow from ``sources`` to ``sinks``.

    Terminals are given by label. Removes, until nothing changes: outgoing
    edges older than every edge entering their tail, incoming edges newer
    than every edge leaving their head, and every edge of a non-source
    vertex without in-edges or a non-sink vertex without out-edges.
    Terminal vertices present in ``tfn`` are kept even if they become isolated.
    """
    src_labels, snk_labels = _validate_terminals(sources, sinks)
    S, T = _resolve(tfn, src_labels), _resolve(tfn, snk_labels)
    edges = tfn.edges
    alive = [True] * len(edges)
    while True:
        ins: list[list[int]] = [[] for _ in range(tfn.num_vertices)]
        outs: list[list[int]] = [[] for _ in range(tfn.num_vertices)]
        for i, e in enumerate(edges):
            if alive[i]:
                outs[e.src].append(edges[i].timestamp)
                ins[e.dst].append(edges[i].timestamp)
        doomed = []
        for i, e in enumerate(edges):
            if not alive[i]:
                continue
            u, v, ts = e.src, e.dst, e.timestamp
            if u not in S and (not ins[u] or (v not in T and ts < min(ins[u]))):
                doomed.append(i)
            elif v not in T and (not outs[v] or (u not in S and ts > max(outs[v]))):
                doomed.append(i)
        if not doomed:
            break
        for i in doomed:
            alive[i] = False
    return tfn.subnetwork((i for i, a in enumerate(alive) if a), keep=S | T)


# ---------------------------------------------------------------------------
# transformation

def transform(tfn: TemporalFlowNetwork) -> Rtfn:
    """Build the time-expanded DAG.

    Static vertices are numbered by ``(vertex, timestamp)``. Static edge ``i``
    is the horizontal image of temporal edge ``i``; vertical edges follow in
    copy order.
    """
    coords = sorted({(e.src, e.timestamp) for e in tfn.edges} | {(e.dst, e.timestamp) for e in tfn.edges})
    index = {c: x for x, c in enumerate(coords)}
    copies: list[list[int]] = [[] for _ in range(tfn.num_vertices)]
    for x, (v, _) in enumerate(coords):
        copies[v].append(x)
    edge_list = [(index[e.src, e.timestamp], index[e.dst, e.timestamp], e.capacity) for e in tfn.edges]
    for chain in copies:
        edge_list.extend((a, b, INF) for a, b in zip(chain, chain[1:]))
    net = StaticFlowNetwork(len(coords), edge_list)
    m = tfn.num_edges
    return Rtfn(
        net=net,
        tfn=tfn,
        members=tuple((c,) for c in coords),
        copies=tuple(tuple(c) for c in copies),
        tr=tuple(range(m)),
        tr_inv=tuple((i,) if i < m else () for i in range(net.num_edges)),
    )


def is_dag(net: StaticFlowNetwork) -> bool:
    indeg = [len(net.in_edges[v]) for v in range(net.num_vertices)]
    queue = deque(v for v in range(net.num_vertices) if indeg[v] == 0)
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in net.successors(v):
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == net.num_vertices


# ---------------------------------------------------------------------------
# classification and vertex compression

def _net(x) -> StaticFlowNetwork:
    return x.net if isinstance(x, Rtfn) else x


def is_flow_out(net, v: int) -> bool:
    net = _net(net)
    ins = net.in_edges[v]
    return not ins or (len(ins) == 1 and net.caps[ins[0]] == INF)


def is_flow_in(net, v: int) -> bool:
    net = _net(net)
    outs = net.out_edges[v]
    return not outs or (len(outs) == 1 and net.caps[outs[0]] == INF)


def classify(net, v: int) -> Color:
    """Color of a static vertex; flow-out wins when both degree clauses hold."""
    net = _net(net)
    if not 0 <= v < net.num_vertices:
        raise ValueError(f"vertex {v} out of range")
    if is_flow_out(net, v):
        return Color.FLOW_OUT
    if is_flow_in(net, v):
        return Color.FLOW_IN
    return Color.FLOW_CROSSING


def merge_case(net, u1: int, u2: int) -> str | None:
    """Which flow-preserving case licenses merging along edge ``u1 -> u2``.

    Returns one of ``"a"``..``"e"`` or ``None``. A vertex meeting both the
    flow-in and flow-out clauses may play either role.
    """
    net = _net(net)
    in1, out1 = is_flow_in(net, u1), is_flow_out(net, u1)
    in2, out2 = is_flow_in(net, u2), is_flow_out(net, u2)
    cross1 = not (in1 or out1)
    cross2 = not (in2 or out2)
    if in1 and in2:
        return "a"
    if out1 and out2:
        return "b"
    if in1 and out2:
        return "c"
    if in1 and cross2:
        return "d"
    if cross1 and out2:
        return "e"
    return None


class _MergeGraph:
    """Mutable adjacency maps supporting repeated vertex merges."""

    def __init__(self, net: StaticFlowNetwork):
        n = net.num_vertices
        self.out: list[dict[int, float]] = [{} for _ in range(n)]
        self.inn: list[dict[int, float]] = [{} for _ in range(n)]
        self.origin: dict[tuple[int, int], list[int]] = {}
        self.groups: list[list[int]] = [[v] for v in range(n)]
        self.alive = [True] * n
        self.base_caps = net.caps
        for i, (u, v, c) in enumerate(net.edges()):
            self._add(u, v, c, [i])

    def _add(self, u, v, c, origins):
        if v in self.out[u]:
            c = cap_add(self.out[u][v], c)
            self.origin[u, v].extend(origins)
        else:
            self.origin[u, v] = list(origins)
        self.out[u][v] = c
        self.inn[v][u] = c

    def _remove(self, u, v):
        del self.out[u][v]
        del self.inn[v][u]
        return self.origin.pop((u, v))

    def flow_in(self, v):
        o = self.out[v]
        return not o or (len(o) == 1 and next(iter(o.values())) == INF)

    def flow_out(self, v):
        i = self.inn[v]
        return not i or (len(i) == 1 and next(iter(i.values())) == INF)

    def merge(self, u1: int, u2: int) -> int:
        w = len(self.alive)
        self.out.append({})
        self.inn.append({})
        self.alive.append(True)
        self.groups.append(sorted(self.groups[u1] + self.groups[u2]))
        pending = []
        for u in (u1, u2):
            for v in list(self.out[u]):
                origins = self._remove(u, v)
                if v not in (u1, u2):
                    pending.append((w, v, origins))
            for v in list(self.inn[u]):
                origins = self._remove(v, u)
                if v not in (u1, u2):
                    pending.append((v, w, origins))
        for a, b, origins in pending:
            self._add(a, b, self._cap_of(origins), origins)
        self.alive[u1] = self.alive[u2] = False
        return w

    def _cap_of(self, origins):
        total = 0
        for i in origins:
            total = cap_add(total, self.base_caps[i])
        return total

    def freeze(self):
        """Static network over live vertices in creation order, plus id maps."""
        live = [v for v, a in enumerate(self.alive) if a]
        renumber = {v: j for j, v in enumerate(live)}
        keyed = []
        for (u, v), origins in self.origin.items():
            keyed.append((min(origins), renumber[u], renumber[v], self.out[u][v], tuple(sorted(origins))))
        keyed.sort()
        net = StaticFlowNetwork(len(live), [(u, v, c) for _, u, v, c, _ in keyed])
        return net, live, renumber, [k[4] for k in keyed]


def vcp(net: StaticFlowNetwork, u1: int, u2: int) -> tuple[StaticFlowNetwork, int, dict[int, int]]:
    """Merge the endpoints of edge ``u1 -> u2`` into one super vertex.

    Returns the new network, the super vertex id and a map from every old
    vertex id to its new id. Surviving vertices keep their relative order and
    the super vertex is numbered last. Edges between ``u1`` and ``u2``
    disappear; parallel edges created by the merge are combined.
    """
    if u1 == u2:
        raise ValueError("cannot merge a vertex with itself")
    if not any(net.heads[i] == u2 for i in net.out_edges[u1]):
        raise ValueError(f"no edge {u1}->{u2}")
    g = _MergeGraph(net)
    w = g.merge(u1, u2)
    new_net, _, renumber, _ = g.freeze()
    remap = {v: renumber[v] for v in range(net.num_vertices) if v not in (u1, u2)}
    remap[u1] = remap[u2] = renumber[w]
    return new_net, renumber[w], remap


def compress(rtfn: Rtfn, protected: Iterable[int] = ()) -> Rtfn:
    """Merge adjacent copies wherever one of the five flow-preserving cases applies.

    Vertices are scanned in creation order (merged vertices are appended and
    scanned later); passes repeat until no merge happens. ``protected`` static
    vertices are never merged. Because every licensed merge runs along an
    infinite edge, a super vertex always holds consecutive copies of a single
    original vertex, so the earliest/latest-copy lookups stay meaningful and
    terminal max-flow values are preserved.
    """
    protected = set(protected)
    g = _MergeGraph(rtfn.net)
    changed = True
    while changed:
        changed = False
        u = 0
        while u < len(g.alive):
            if g.alive[u] and u not in protected:
                partner = None
                for v in sorted(g.out[u]):
                    if v not in protected and (g.flow_in(u) or g.flow_out(v)):
                        partner = (u, v)
                        break
                if partner is None:
                    for v in sorted(g.inn[u]):
                        if v not in protected and (g.flow_in(v) or g.flow_out(u)):
                            partner = (v, u)
                            break
                if partner is not None:
                    g.merge(*partner)
                    changed = True
            u += 1

    net, live, renumber, origins = g.freeze()
    members = tuple(
        tuple(sorted(m for x in g.groups[v] for m in rtfn.members[x])) for v in live
    )
    copies: list[list[int]] = [[] for _ in range(rtfn.tfn.num_vertices)]
    for x, group in enumerate(members):
        for v, ts in group:
            copies[v].append((ts, x))
    copies_t = tuple(tuple(dict.fromkeys(x for _, x in sorted(c))) for c in copies)
    tr: list[int | None] = [None] * rtfn.tfn.num_edges
    tr_inv = []
    for x, orig in enumerate(origins):
        carried = tuple(sorted(t for o in orig for t in rtfn.tr_inv[o]))
        tr_inv.append(carried)
        for t in carried:
            tr[t] = x
    return Rtfn(
        net=net,
        tfn=rtfn.tfn,
        members=members,
        copies=copies_t,
        tr=tuple(tr),
        tr_inv=tuple(tr_inv),
        compressed=True,
    )


def preprocess(tfn: TemporalFlowNetwork, sources=None, sinks=None, *, do_reduce=True, do_compress=True) -> Rtfn:
    """reduce (when terminals are given) then transform then compress."""
    if do_reduce and sources is not None and sinks is not None:
        tfn = reduce(tfn, sources, sinks)
    rtfn = transform(tfn)
    if do_compress:
        rtfn = compress(rtfn)
    return rtfn
