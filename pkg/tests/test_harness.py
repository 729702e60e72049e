import math

import pytest

from orderdag import harness
from orderdag.bounds import epsilon
from orderdag.harness import (CouplingConfig, SweepConfig, cell_seed, emit_records, emit_results,
                              parse_results, record_invariant_violations, run_coupling_campaign,
                              run_sweep, sample_stats, successive_differences)
from orderdag.metrics import measure
from orderdag.sampler import SampleConfig, sample_order_dag

SMALL = dict(n_values=[3, 6], rho_values=[0.3, 0.6], r_values=[1, 2], samples=90)


def test_config_validation():
    assert SweepConfig(r_values=[2]).r_values == [0, 2]
    with pytest.raises(ValueError):
        SweepConfig(samples=0)
    with pytest.raises(ValueError):
        SweepConfig(rho_values=[1.5])
    with pytest.raises(ValueError):
        SweepConfig.from_dict({"bogus": 1})
    assert SweepConfig.from_dict({"samples": 5}).samples == 5


def test_cell_seed_depends_on_rho_only():
    assert cell_seed(0, 0.5) == cell_seed(0, 0.5)
    assert cell_seed(0, 0.5) != cell_seed(0, 0.2)
    assert cell_seed(0, 0.5) != cell_seed(1, 0.5)


def test_stats():
    s, mean, var, half = sample_stats([1.0, 2.0, 3.0, 4.0])
    assert (s, mean) == (4, 2.5)
    assert var == pytest.approx(5 / 3)
    assert half == pytest.approx(2 * math.sqrt(5 / 12))
    assert math.isnan(sample_stats([])[1])


def test_sweep_shape_and_round_trip():
    result = run_sweep(SweepConfig(**SMALL))
    assert len(result.records) == 4 * 90 and not result.failures
    # per cell: I, I_A, then six metrics for each of r = 0, 1, 2
    assert len(result.summaries) == 4 * (2 + 6 * 3)
    for fmt in ("csv", "json"):
        text = emit_results(result.summaries, fmt)
        assert parse_results(text, fmt) == result.summaries
    lines = emit_records(result.records).splitlines()
    assert len(lines) == 1 + len(result.records)
    assert record_invariant_violations(result.records) == []


def test_sweep_matches_direct_measurement():
    cfg = SweepConfig(n_values=[5], rho_values=[0.4], r_values=[1], samples=10, seed=3)
    result = run_sweep(cfg)
    seed = cell_seed(3, 0.4)
    for k, rec in enumerate(result.records):
        direct = measure(sample_order_dag(SampleConfig(5, 0.4, seed, k)), [0, 1], rho=0.4,
                         seed=seed, index=k)
        assert rec.row() == direct.row()


def test_sweep_is_worker_independent():
    a = emit_results(run_sweep(SweepConfig(**SMALL, workers=1)).summaries)
    b = emit_results(run_sweep(SweepConfig(**SMALL, workers=2)).summaries)
    assert a == b


def test_invariant_checker_catches_bad_record():
    rec = measure(sample_order_dag(SampleConfig(6, 0.5, 0, 1)), [0])
    rec.log2L = rec.X + 1.0
    assert record_invariant_violations([rec])


def test_small_coupling_campaign():
    cfg = CouplingConfig(pairs=60)
    assert run_coupling_campaign(cfg) == []


def test_successive_differences_small():
    checks = successive_differences([3, 4, 5], 0.5, 4000)
    assert [c.n for c in checks] == [3, 4, 5]
    assert all(c.ok for c in checks)


def test_reproduction_uses_epsilon():
    rep = harness.reproduce_asymptotic_bound(samples=2000, range_override=450)
    assert rep.s == 2000 and rep.B == 450
    assert rep.upper == pytest.approx(rep.bernstein_upper + epsilon(0.5, 30))
