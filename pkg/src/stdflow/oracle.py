"""Independent reference implementations used to cross-check the main pipeline.

Nothing here reuses reduction, compression or the package's own max-flow
solver: subset flows go through scipy's Edmonds-Karp on the uncompressed
time-expanded network, and maximum temporal flow is also available as a
linear program written directly over the temporal edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .densest import Query, StdfAnswer
from .network import INF, Flow, StaticFlowNetwork, TemporalFlowNetwork
from .preprocess import Rtfn, transform

BRUTEFORCE_CAP = 12
_INT32_MAX = 2**31 - 1


@dataclass(frozen=True)
class TemporalFlowAssignment:
    """Flow on each temporal edge (indexed like ``tfn.edges``) and its value."""

    flows: tuple[int, ...]
    value: int


@dataclass
class FeasibilityReport:
    ok: bool
    violations: list[str] = field(default_factory=list)
    first: tuple[int, int] | None = None   # (vertex label, timestamp) of the first causality breach

    def __bool__(self) -> bool:
        return self.ok


def check_temporal_feasibility(tfn: TemporalFlowNetwork, assignment: TemporalFlowAssignment, s: int, t: int) -> FeasibilityReport:
    """Capacity, final balance at inner vertices, and inflow-before-outflow at every
    (vertex, timestamp) except the two terminals. ``s``/``t`` are labels."""
    report = FeasibilityReport(True)
    flows = assignment.flows
    if len(flows) != tfn.num_edges:
        return FeasibilityReport(False, [f"assignment has {len(flows)} entries for {tfn.num_edges} edges"])
    for i, (e, f) in enumerate(zip(tfn.edges, flows)):
        if f < 0 or f > e.capacity:
            report.violations.append(f"edge {i} flow {f} outside [0, {e.capacity}]")
    src, snk = tfn.vertex(s), tfn.vertex(t)
    for v in range(tfn.num_vertices):
        if v in (src, snk):
            continue
        events: dict[int, int] = {}
        for i in tfn.in_edges[v]:
            events[tfn.edges[i].timestamp] = events.get(tfn.edges[i].timestamp, 0) + flows[i]
        for i in tfn.out_edges[v]:
            events[tfn.edges[i].timestamp] = events.get(tfn.edges[i].timestamp, 0) - flows[i]
        balance = 0
        breached = False
        for ts in sorted(events):
            balance += events[ts]
            if balance < 0 and not breached:
                breached = True
                report.violations.append(f"vertex {tfn.label(v)} sends more than it received by time {ts}")
                if report.first is None:
                    report.first = (tfn.label(v), ts)
        if balance != 0:
            report.violations.append(f"vertex {tfn.label(v)} ends unbalanced by {balance}")
    value = _net_out(tfn, flows, src)
    if value != assignment.value:
        report.violations.append(f"stated value {assignment.value} != net source outflow {value}")
    report.ok = not report.violations
    return report


def _net_out(tfn: TemporalFlowNetwork, flows, v) -> int:
    if v is None:
        return 0
    return sum(flows[i] for i in tfn.out_edges[v]) - sum(flows[i] for i in tfn.in_edges[v])


def project_flow(rtfn: Rtfn, flow: Flow) -> TemporalFlowAssignment:
    """Give each temporal edge the flow of its horizontal image.

    Only defined on uncompressed networks: compression keeps flow values but
    not the time order inside a merged vertex.
    """
    if rtfn.compressed:
        raise ValueError("projection needs an uncompressed network")
    if any(len(carried) > 1 for carried in rtfn.tr_inv):
        raise ValueError("projection needs one temporal edge per static edge")
    flows = tuple(0 if x is None else flow.edge_flow[x] for x in rtfn.tr)
    return TemporalFlowAssignment(flows, flow.value)


def lift_flow(tfn: TemporalFlowNetwork, assignment: TemporalFlowAssignment, s: int, t: int) -> tuple[Rtfn, Flow]:
    """Rebuild a static flow on ``transform(tfn)``.

    Horizontal edges copy the temporal flows; the vertical edge leaving copy
    ``u@ts`` carries what ``u`` still holds after ``ts``, which for the source
    also counts the value it has yet to emit.
    """
    report = check_temporal_feasibility(tfn, assignment, s, t)
    if not report:
        raise ValueError(f"assignment is not a temporal flow: {report.violations}")
    rtfn = transform(tfn)
    edge_flow = list(assignment.flows) + [0] * (rtfn.net.num_edges - tfn.num_edges)
    src = tfn.vertex(s)
    for v, chain in enumerate(rtfn.copies):
        balance = assignment.value if v == src else 0
        for x in chain[:-1]:
            ts = rtfn.members[x][0][1]
            for i in tfn.in_edges[v]:
                if tfn.edges[i].timestamp == ts:
                    balance += assignment.flows[i]
            for i in tfn.out_edges[v]:
                if tfn.edges[i].timestamp == ts:
                    balance -= assignment.flows[i]
            if balance < 0:
                raise ValueError(f"terminal {tfn.label(v)} would need negative holdover after time {ts}")
            vertical = next(j for j in rtfn.net.out_edges[x] if not rtfn.tr_inv[j])
            edge_flow[vertical] = balance
    return rtfn, Flow(assignment.value, tuple(edge_flow))


# ---------------------------------------------------------------------------
# scipy-backed max flow

def _finite_bound(net: StaticFlowNetwork) -> int:
    return sum(c for c in net.caps if c != INF) + 1


def scipy_max_flow_sets(net: StaticFlowNetwork, sources, sinks) -> int:
    """Multi-terminal max flow through scipy's Edmonds-Karp."""
    sources, sinks = sorted(set(sources)), sorted(set(sinks))
    if not sources or not sinks:
        return 0
    n = net.num_vertices
    big = _finite_bound(net)
    if big > _INT32_MAX:
        raise OverflowError("capacities too large for the scipy oracle")
    rows, cols, data = [], [], []
    for u, v, c in net.edges():
        rows.append(u)
        cols.append(v)
        data.append(big if c == INF else c)
    for x in sources:
        rows.append(n)
        cols.append(x)
        data.append(big)
    for x in sinks:
        rows.append(x)
        cols.append(n + 1)
        data.append(big)
    # duplicate (row, col) entries are summed, which is the right semantics for parallel edges
    graph = csr_matrix((np.array(data, dtype=np.int32), (rows, cols)), shape=(n + 2, n + 2))
    graph.sum_duplicates()
    return int(maximum_flow(graph, n, n + 1, method="edmonds_karp").flow_value)


def subset_flow(rtfn: Rtfn, sources, sinks) -> int:
    src = [x for x in (rtfn.source_vertex(s) for s in sources) if x is not None]
    snk = [x for x in (rtfn.sink_vertex(t) for t in sinks) if x is not None]
    return scipy_max_flow_sets(rtfn.net, src, snk)


def stdf_bruteforce(tfn: TemporalFlowNetwork, query: Query) -> StdfAnswer:
    """Exact optimum by trying every subset pair on the uncompressed network.

    Ties go to the smaller size, then to the lexicographically smallest
    ``(sources, sinks)``.
    """
    if query.size > BRUTEFORCE_CAP:
        raise ValueError(f"brute force is limited to {BRUTEFORCE_CAP} terminals, got {query.size}")
    rtfn = transform(tfn)
    best = None
    for size in range(max(query.k, 2), query.size + 1):
        for a in range(1, size):
            b = size - a
            if a > len(query.sources) or b > len(query.sinks):
                continue
            for S in combinations(query.sources, a):
                for T in combinations(query.sinks, b):
                    value = subset_flow(rtfn, S, T)
                    key = (-Fraction(value, size), size, S, T)
                    if best is None or key < best[0]:
                        best = (key, value, S, T)
    if best is None:
        # only possible when k exceeds every two-sided pair size
        raise ValueError("no subset pair satisfies the size bound")
    _, value, S, T = best
    return StdfAnswer(S, T, value)


def max_temporal_flow_lp(tfn: TemporalFlowNetwork, s: int, t: int) -> Fraction:
    """Maximum temporal flow as an LP over per-edge flows.

    Every vertex other than the source may never have sent more than it has
    received at any timestamp; inner vertices end balanced. The objective is
    the sink's net inflow. The optimum is returned rounded to a rational with
    small denominator.
    """
    src, snk = tfn.vertex(s), tfn.vertex(t)
    m = tfn.num_edges
    if src is None or snk is None or m == 0:
        return Fraction(0)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for v in range(tfn.num_vertices):
        if v == src:
            continue
        stamps = sorted({tfn.edges[i].timestamp for i in tfn.in_edges[v] + tfn.out_edges[v]})
        for ts in stamps:
            row = np.zeros(m)
            for i in tfn.in_edges[v]:
                if tfn.edges[i].timestamp <= ts:
                    row[i] -= 1
            for i in tfn.out_edges[v]:
                if tfn.edges[i].timestamp <= ts:
                    row[i] += 1
            a_ub.append(row)
            b_ub.append(0.0)
        if v != snk and stamps:
            row = np.zeros(m)
            for i in tfn.in_edges[v]:
                row[i] += 1
            for i in tfn.out_edges[v]:
                row[i] -= 1
            a_eq.append(row)
            b_eq.append(0.0)
    c = np.zeros(m)
    for i in tfn.in_edges[snk]:
        c[i] -= 1
    for i in tfn.out_edges[snk]:
        c[i] += 1
    res = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=b_ub or None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=b_eq or None,
        bounds=[(0, e.capacity) for e in tfn.edges],
        method="highs",
    )
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    return Fraction(-res.fun).limit_denominator(1000)
