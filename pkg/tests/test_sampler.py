import math

import pytest
from hypothesis import given, strategies as st

from orderdag.sampler import (SampleConfig, derive_seed, restrict_prefix, sample_chain,
                              sample_coupled, sample_order_dag, sample_permuted_dag)

configs = st.builds(SampleConfig, n=st.integers(1, 40), rho=st.floats(0, 1),
                    seed=st.integers(0, 2**64 - 1), index=st.integers(0, 10**6))


def test_rho_zero_is_empty():
    assert sample_order_dag(SampleConfig(3, 0.0)).num_edges == 0


def test_rho_one_is_complete():
    g = sample_order_dag(SampleConfig(3, 1.0))
    assert g.edges == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("bad", [dict(n=0, rho=0.5), dict(n=3, rho=1.5), dict(n=3, rho=-0.1),
                                 dict(n=3, rho=float("nan"))])
def test_invalid_config(bad):
    with pytest.raises(ValueError):
        SampleConfig(**bad)


@given(configs)
def test_deterministic(cfg):
    assert sample_order_dag(cfg) == sample_order_dag(cfg)


@given(configs)
def test_coupling_consistency(cfg):
    pair = sample_coupled(cfg)
    assert pair.g_small == sample_order_dag(cfg)
    assert restrict_prefix(pair.g_big, cfg.n) == pair.g_small
    assert pair.g_big == sample_order_dag(SampleConfig(cfg.n + 1, cfg.rho, cfg.seed, cfg.index))


def test_coupled_extremes():
    assert sample_coupled(SampleConfig(4, 0.0)).g_big.parents[4] == 0
    assert sample_coupled(SampleConfig(4, 1.0)).g_big.parents[4] == 0b1111


def test_chain():
    cfg = SampleConfig(5, 0.4, 3, 9)
    assert sample_chain(cfg, 0) == [sample_order_dag(cfg)]
    assert all(g.num_edges == 0 for g in sample_chain(SampleConfig(5, 0.0), 2))
    pair = sample_coupled(cfg)
    assert sample_chain(cfg, 1) == [pair.g_small, pair.g_big]
    with pytest.raises(ValueError):
        sample_chain(cfg, -1)


def test_derive_seed_separates_parts():
    assert derive_seed(0, 1, 2) != derive_seed(0, 2, 1)
    assert derive_seed(5) == derive_seed(5)


def test_mean_edge_count_n30():
    """Edge count is Binomial(435, 0.5): mean 217.5 within 1."""
    total = sum(sample_order_dag(SampleConfig(30, 0.5, 17, k)).num_edges for k in range(20000))
    mean = total / 20000
    # sd of the mean is sqrt(435 * 0.25 / 20000) ~ 0.074
    assert abs(mean - 217.5) < 0.3


def test_per_pair_frequency_of_coupled_graph():
    """Every pair of g_big appears with frequency rho within 3 sigma (10000 pairs)."""
    rho, n, reps = 0.3, 6, 10000
    counts = {}
    for k in range(reps):
        for e in sample_coupled(SampleConfig(n, rho, 4, k)).g_big.edges:
            counts[e] = counts.get(e, 0) + 1
    sigma = math.sqrt(rho * (1 - rho) / reps)
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            assert abs(counts.get((i, j), 0) / reps - rho) < 3.5 * sigma


def test_permuted_sampler_has_same_edge_count_law():
    reps = 4000
    a = sum(sample_order_dag(SampleConfig(8, 0.4, 1, k)).num_edges for k in range(reps)) / reps
    b = sum(sample_permuted_dag(SampleConfig(8, 0.4, 2, k)).num_edges for k in range(reps)) / reps
    sd = math.sqrt(28 * 0.24 / reps)
    assert abs(a - b) < 4 * math.sqrt(2) * sd
