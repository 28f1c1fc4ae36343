import itertools
import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import DATA, NAMES, load, random_instance, two_components_query
from stdflow.densest import (
    DensestFlowArray,
    FlowEvaluator,
    Query,
    WccPair,
    answer,
    decompose,
    df_exact,
    merge,
    merge_pair,
    prepare,
    stdf_exact,
    subset_pairs,
)
from stdflow.errors import BudgetExceededError, InfeasibleQueryError, QueryError
from stdflow.network import from_records
from stdflow.oracle import stdf_bruteforce, subset_flow

N = NAMES["two_components"]


# ---------------------------------------------------------------- queries

def test_query_normalizes_order():
    q = Query((3, 1, 1), (9, 5), 2)
    assert q.sources == (1, 3) and q.sinks == (5, 9) and q.size == 4


@pytest.mark.parametrize(
    "sources, sinks, k, error",
    [
        ((), (1,), 1, QueryError),
        ((1,), (), 1, QueryError),
        ((1, 2), (2, 3), 1, QueryError),
        ((1,), (2,), 0, QueryError),
        ((1,), (2,), 3, InfeasibleQueryError),
    ],
)
def test_query_validation(sources, sinks, k, error):
    with pytest.raises(error):
        Query(sources, sinks, k)


def test_query_json_roundtrip():
    q = Query.from_json((DATA / "two_components.query.json").read_text())
    assert q == Query.from_json(q.to_json())
    assert Query.from_json(q.to_json(), k=2).k == 2
    with pytest.raises(QueryError):
        Query.from_json('{"sources": [1]}')
    with pytest.raises(QueryError):
        Query.from_json("not json")


# ---------------------------------------------------------------- decomposition

def test_fixture_decomposes_into_two_groups():
    tfn, q = load("two_components"), two_components_query()
    rtfn, _ = prepare(tfn, q)
    part = decompose(rtfn, q)
    assert part.pairs == (
        WccPair((N["s1"], N["s2"]), (N["t1"], N["t2"], N["t3"])),
        WccPair((N["s3"], N["s4"]), (N["t4"], N["t5"])),
    )
    assert part.isolated_sources == () and part.isolated_sinks == ()


def test_fully_connected_query_is_one_group():
    tfn = from_records([(0, 2, 3, 1), (1, 2, 3, 2), (2, 3, 4, 3), (2, 4, 4, 4)])
    q = Query((0, 1), (3, 4), 2)
    part = decompose(prepare(tfn, q)[0], q)
    assert part.pairs == (WccPair((0, 1), (3, 4)),)


def test_no_reachable_pair_gives_zero_density():
    tfn = from_records([(0, 1, 5, 4), (1, 2, 5, 2)])
    q = Query((0,), (2,), 1)
    part = decompose(prepare(tfn, q)[0], q)
    assert part.pairs == () and part.isolated_sources == (0,) and part.isolated_sinks == (2,)
    result = stdf_exact(tfn, q)
    assert result.value == 0 and result.density == 0 and result.degenerate


def test_isolated_terminals_only_added_when_needed():
    # source 7 reaches nothing in time
    tfn = from_records([(0, 1, 6, 1), (7, 2, 1, 5), (2, 1, 1, 3)])
    assert stdf_exact(tfn, Query((0, 7), (1,), 2)).sources == (0,)
    padded = stdf_exact(tfn, Query((0, 7), (1,), 3))
    assert padded.sources == (0, 7) and padded.value == 6 and padded.density == 2


# ---------------------------------------------------------------- per-group tables

def test_df_exact_on_fixture_group():
    tfn, q = load("two_components"), two_components_query()
    rtfn, _ = prepare(tfn, q)
    pair = decompose(rtfn, q).pairs[0]
    df = df_exact(FlowEvaluator(rtfn), pair)
    assert df.values == (0, 0, 5, 9, 10, 11)
    assert df.witnesses[2] == ((N["s2"],), (N["t2"],))
    assert df.complete


def test_df_exact_single_path():
    tfn = from_records([(0, 1, 4, 1), (1, 2, 3, 2)])
    q = Query((0,), (2,), 2)
    rtfn, _ = prepare(tfn, q)
    df = df_exact(FlowEvaluator(rtfn), WccPair((0,), (2,)))
    assert df.values == (0, 0, 3)


@pytest.mark.parametrize("seed", range(40))
def test_df_exact_matches_recomputed_flows(seed):
    tfn, q = random_instance(seed, max_terminals=6)
    rtfn, _ = prepare(tfn, q)
    df = df_exact(FlowEvaluator(rtfn), WccPair(q.sources, q.sinks))
    for size in range(2, q.size + 1):
        best = max(
            (subset_flow(rtfn, S, T) for S, T in subset_pairs(q.sources, q.sinks) if len(S) + len(T) == size),
            default=0,
        )
        assert df.values[size] == best
        S, T = df.witnesses[size]
        assert subset_flow(rtfn, S, T) == best


def test_df_exact_budget():
    tfn, q = load("two_components"), two_components_query()
    rtfn, _ = prepare(tfn, q)
    with pytest.raises(BudgetExceededError):
        df_exact(FlowEvaluator(rtfn), WccPair(q.sources, q.sinks), budget=511)
    assert df_exact(FlowEvaluator(rtfn), WccPair(q.sources, q.sinks), budget=512).complete


def test_df_exact_deadline_returns_partial_table():
    tfn, q = load("two_components"), two_components_query()
    rtfn, _ = prepare(tfn, q)
    evaluate = FlowEvaluator(rtfn)
    df = df_exact(evaluate, WccPair(q.sources, q.sinks), deadline=time.monotonic() - 1)
    assert not df.complete
    assert evaluate.calls == 1
    assert df.values[-1] == 22  # the full set is always evaluated first


# ---------------------------------------------------------------- merging

def _table(values):
    # witness of size j: source 0 with sinks 1..j-1
    witnesses = [((), ())] + [((0,), tuple(range(1, j))) for j in range(1, len(values))]
    return DensestFlowArray(tuple(values), tuple(witnesses))


def test_merge_fixture_tables():
    a = _table([0, 0, 5, 9, 10, 11])
    b = _table([0, 0, 7, 8, 11])
    assert merge_pair(a, b).values == (0, 0, 7, 9, 12, 16, 17, 20, 21, 22)


def test_merge_with_empty_table_is_identity():
    a = _table([0, 0, 5, 9])
    assert merge([a, merge([])]).values == a.values
    assert merge([]).values == (0,)


def _reference_merge3(a, b, c):
    n = len(a) + len(b) + len(c) - 3
    out = [None] * (n + 1)
    for i in range(len(a)):
        for j in range(len(b)):
            for l in range(len(c)):
                v = a[i] + b[j] + c[l]
                if out[i + j + l] is None or v > out[i + j + l]:
                    out[i + j + l] = v
    return tuple(out)


def _random_table(rng):
    return _table([0, 0] + [rng.randint(0, 30) for _ in range(rng.randint(0, 5))])


@pytest.mark.parametrize("seed", range(100))
def test_merge_matches_reference_and_is_order_invariant(seed):
    rng = random.Random(seed)
    tables = [_random_table(rng) for _ in range(3)]
    expected = _reference_merge3(*(t.values for t in tables))
    for perm in itertools.permutations(tables):
        assert merge(list(perm)).values == expected
        assert merge_pair(merge_pair(perm[0], perm[1]), perm[2]).values == expected


def test_merge_combines_witnesses():
    a = DensestFlowArray((0, 0, 5), (((), ()), ((1,), ()), ((1,), (5,))))
    b = DensestFlowArray((0, 0, 7), (((), ()), ((3,), ()), ((3,), (8,))))
    assert merge_pair(a, b).witnesses[4] == ((1, 3), (5, 8))


# ---------------------------------------------------------------- answers

def test_answer_on_merged_fixture_table():
    df = _table([0, 0, 7, 9, 12, 16, 17, 20, 21, 22])
    assert answer(df, 4).density == Fraction(16, 5)
    assert answer(df, 2).density == Fraction(7, 2)
    assert answer(df, 9).size == 9


def test_answer_prefers_smaller_size_on_ties():
    assert answer(_table([0, 0, 4, 6, 8]), 2).size == 2


def test_answer_rejects_large_k():
    with pytest.raises(InfeasibleQueryError):
        answer(_table([0, 0, 3]), 3)
    with pytest.raises(QueryError):
        answer(_table([0, 0, 3]), 0)


def test_answer_degenerate_when_nothing_flows():
    result = answer(DensestFlowArray.zeros((1, 2), (3,)), 2)
    assert result.degenerate and result.density == 0


# ---------------------------------------------------------------- pipeline

def test_exact_fixture_answer():
    result = stdf_exact(load("two_components"), two_components_query())
    assert result.density == Fraction(16, 5)
    assert result.sources == (N["s2"], N["s4"])
    assert result.sinks == (N["t2"], N["t3"], N["t5"])
    assert result.details["per_wcc"][0]["df"][2:] == [5, 9, 10, 11]
    assert result.details["merged"][5] == 16


def test_decomposition_saves_flow_evaluations():
    tfn, q = load("two_components"), two_components_query()
    assert stdf_exact(tfn, q).details["maxflow_calls"] == 48
    whole = stdf_exact(tfn, q, decomposition=False)
    assert whole.details["maxflow_calls"] == 512
    assert whole.density == Fraction(16, 5)


def test_merged_table_equals_whole_enumeration():
    tfn, q = load("two_components"), two_components_query()
    rtfn, _ = prepare(tfn, q)
    whole = df_exact(FlowEvaluator(rtfn), WccPair(q.sources, q.sinks))
    assert list(whole.values) == stdf_exact(tfn, q).details["merged"]


def test_group_flows_add_up():
    tfn, q = load("two_components"), two_components_query()
    rtfn, _ = prepare(tfn, q)
    evaluate = FlowEvaluator(rtfn)
    a, b = decompose(rtfn, q).pairs
    both = evaluate(a.sources + b.sources, a.sinks + b.sinks)
    assert both == evaluate(a.sources, a.sinks) + evaluate(b.sources, b.sinks) == 22


@pytest.mark.parametrize("seed", range(60))
def test_exact_matches_bruteforce(seed):
    tfn, q = random_instance(seed, max_terminals=8)
    exact = stdf_exact(tfn, q)
    brute = stdf_bruteforce(tfn, q)
    assert exact.density == brute.density
    assert exact.size >= q.k
    rtfn, _ = prepare(tfn, q)
    if exact.size:
        assert subset_flow(rtfn, exact.sources, exact.sinks) == exact.value


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_flow_is_monotone_in_subsets(seed):
    tfn, q = random_instance(seed, max_terminals=6)
    rtfn, _ = prepare(tfn, q)
    evaluate = FlowEvaluator(rtfn)
    rng = random.Random(seed)
    S = [s for s in q.sources if rng.random() < 0.5]
    T = [t for t in q.sinks if rng.random() < 0.5]
    assert evaluate(S, T) <= evaluate(q.sources, T) <= evaluate(q.sources, q.sinks)
    assert evaluate(S, T) <= evaluate(S, q.sinks)


def test_subset_pairs_counts():
    pairs = list(subset_pairs((1, 2), (3, 4, 5)))
    assert len(pairs) == 3 * 7
    assert all(S and T for S, T in pairs)
    assert len(list(subset_pairs((1, 2), (3, 4, 5), min_size=4))) == 6
