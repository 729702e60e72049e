import itertools
import random

import pytest
from hypothesis import given

from orderdag import Dag
from orderdag.equivalence import interventional_essential_graph
from orderdag.graph import InterventionSet
from orderdag.metrics import (BudgetExceeded, measure, metric_I, metric_Lr, metric_X,
                              metric_Xr_exact, record_columns)
from orderdag.sampler import SampleConfig, sample_order_dag

from conftest import dags

CHAIN = Dag.from_edges(3, [(0, 1), (1, 2)])
COLLIDER = Dag.from_edges(3, [(0, 2), (1, 2)])


def test_metric_examples():
    assert metric_X(COLLIDER) == 0
    assert metric_X(CHAIN) == 2
    assert metric_X(Dag.from_edges(3, [])) == 0
    assert metric_I(COLLIDER) == (0, True)
    assert metric_I(Dag.from_edges(2, [(0, 1)])) == (1, True)
    assert metric_I(CHAIN) == (1, True)
    assert metric_Xr_exact(CHAIN, 0)[0] == 2
    assert metric_Xr_exact(CHAIN, 1)[0] == 0
    assert metric_Xr_exact(COLLIDER, 2)[0] == 0
    assert metric_Lr(CHAIN, InterventionSet()).value == 3
    assert metric_Lr(CHAIN, InterventionSet([1])).value == 1
    assert metric_Lr(COLLIDER, InterventionSet([0])).value == 1


def test_xr_lexicographic_tie_break():
    # both 0 and 1 orient the whole chain; the smallest set wins
    assert tuple(metric_Xr_exact(CHAIN, 1)[1]) == (0,)


def test_xr_pads_with_non_candidates():
    g = Dag.from_edges(4, [(0, 1)])
    value, targets = metric_Xr_exact(g, 3)
    assert value == 0 and len(targets) == 3


def test_budget():
    g = Dag.from_edges(8, [(i, j) for i in range(8) for j in range(i + 1, 8)])
    with pytest.raises(BudgetExceeded):
        metric_Xr_exact(g, 4, budget=10)
    with pytest.raises(ValueError):
        metric_Xr_exact(g, 9)


def test_metric_I_falls_back_to_greedy():
    g = Dag.from_edges(6, [(i, j) for i in range(6) for j in range(i + 1, 6)])
    exact, flag = metric_I(g)
    approx, approx_flag = metric_I(g, exact_limit=3)
    assert flag and not approx_flag
    assert approx >= exact == 3  # complete graph on k vertices needs k // 2


@given(dags(max_n=7))
def test_xr_non_increasing_and_matches_I(g):
    values = [metric_Xr_exact(g, r)[0] for r in range(g.n + 1)]
    assert values == sorted(values, reverse=True)
    i_val, exact = metric_I(g)
    assert exact
    assert i_val == next(r for r, v in enumerate(values) if v == 0)


@given(dags(max_n=7))
def test_xr_beats_random_sets(g):
    rng = random.Random(repr(g.parents))
    for r in range(1, min(g.n, 3) + 1):
        best, targets = metric_Xr_exact(g, r)
        assert interventional_essential_graph(g, targets).num_undirected == best
        for _ in range(20):
            other = rng.sample(range(g.n), r)
            assert best <= interventional_essential_graph(g, other).num_undirected


@given(dags(max_n=7))
def test_log2_lr_at_most_xr(g):
    for r in range(g.n + 1):
        x, targets = metric_Xr_exact(g, r)
        assert metric_Lr(g, targets).log2 <= x


def test_I_matches_brute_force():
    for index in range(60):
        g = sample_order_dag(SampleConfig(7, 0.5, 3, index))
        want = next(k for k in range(g.n + 1)
                    if any(interventional_essential_graph(g, s).num_undirected == 0
                           for s in itertools.combinations(range(g.n), k)))
        assert metric_I(g) == (want, True)


def test_measure_record():
    rec = measure(CHAIN, (0, 1, 2), rho=0.5, seed=1, index=2)
    assert (rec.X, rec.isuEss, rec.I, rec.log2L) == (2, 0, 1, pytest.approx(1.584962500721156))
    assert rec.per_r[1].X == 0 and rec.per_r[1].exact
    assert rec.greedy[1].X == 0 and not rec.greedy[1].exact
    assert rec.I_A == 1
    assert rec.columns() == record_columns([0, 1, 2])
    assert len(rec.row()) == len(rec.columns())
    assert rec.to_json_dict()["X_r0"] == 2


def test_measure_budget_fallback_is_flagged():
    g = sample_order_dag(SampleConfig(14, 0.9, 0, 0))
    rec = measure(g, (0, 3), subset_budget=5)
    assert not rec.per_r[3].exact
    assert rec.per_r[3].X == rec.greedy[3].X


def test_measure_clamps_r_to_n():
    rec = measure(CHAIN, (5,))
    assert rec.per_r[5].X == 0
