"""Run every query algorithm on random queries and tabulate the results."""

from __future__ import annotations

import random
import time
from fractions import Fraction

from .densest import DEFAULT_BUDGET, Query, StdfAnswer, stdf_exact
from .errors import BudgetExceededError
from .generate import random_query
from .network import TemporalFlowNetwork
from .peeling import peel_dc, stdf_peel

ALGORITHMS = ("dc", "peel", "peel-prune", "peel-dc", "peel-dc-prune")
PEELING = ALGORITHMS[1:]


def solve(
    algo: str,
    tfn: TemporalFlowNetwork,
    query: Query,
    *,
    budget: int = DEFAULT_BUDGET,
    deadline: float | None = None,
    exact_wcc_threshold: int = 6,
) -> StdfAnswer:
    if algo == "dc":
        return stdf_exact(tfn, query, budget=budget, deadline=deadline)
    if algo == "peel":
        return stdf_peel(tfn, query, prune=False)
    if algo == "peel-prune":
        return stdf_peel(tfn, query, prune=True)
    if algo == "peel-dc":
        return peel_dc(tfn, query, prune=False, exact_wcc_threshold=exact_wcc_threshold, deadline=deadline)
    if algo == "peel-dc-prune":
        return peel_dc(tfn, query, prune=True, exact_wcc_threshold=exact_wcc_threshold, deadline=deadline)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_bench(
    tfn: TemporalFlowNetwork,
    rng: random.Random,
    n: int,
    num_queries: int,
    *,
    time_limit_ms: int | None = None,
    exact_wcc_threshold: int = 6,
    budget: int = DEFAULT_BUDGET,
    timings: bool = True,
) -> list[dict]:
    """One row per (query, algorithm).

    ``check`` is ``ok`` when the densities respect exact >= peeled >= exact/3,
    ``skip`` when the exact run did not finish, and ``VIOLATION`` otherwise.
    """
    rows = []
    for qi in range(num_queries):
        query = random_query(rng, tfn, n)
        results: dict[str, tuple[StdfAnswer | None, str, float]] = {}
        for algo in ALGORITHMS:
            start = time.perf_counter()
            deadline = None if time_limit_ms is None else time.monotonic() + time_limit_ms / 1000
            try:
                ans = solve(algo, tfn, query, budget=budget, deadline=deadline, exact_wcc_threshold=exact_wcc_threshold)
                status = "timeout" if ans.timed_out else "ok"
            except BudgetExceededError:
                ans, status = None, "budget"
            results[algo] = (ans, status, (time.perf_counter() - start) * 1000)
        exact = results["dc"][0] if results["dc"][1] == "ok" else None
        for algo in ALGORITHMS:
            ans, status, elapsed = results[algo]
            density = ans.density if ans else Fraction(0)
            if exact is None or ans is None:
                check = "skip"
            elif algo == "dc" or (density <= exact.density and 3 * density >= exact.density):
                check = "ok"
            else:
                check = "VIOLATION"
            row = {
                "query": qi,
                "k": query.k,
                "algorithm": algo,
                "status": status,
                "value": ans.value if ans else "",
                "density_num": density.numerator,
                "density_den": density.denominator,
                "maxflow_calls": ans.details.get("maxflow_calls", "") if ans else "",
                "timed_out": status != "ok",
                "check": check,
            }
            if timings:
                row["elapsed_ms"] = f"{elapsed:.3f}"
            rows.append(row)
    return rows
