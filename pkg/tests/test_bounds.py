import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from orderdag.bounds import (asymptotic_interval, bernstein_lower, bernstein_upper,
                             default_range, diff_lower_bound, epsilon, epsilon_algo,
                             epsilon_series, rhs)

mpmath.mp.dps = 50
GRID_RHO = [0.1, 0.2, 0.5, 0.7]


def rel(a, b):
    return abs(a - b) / abs(b)


def mp_rhs(rho, n):
    rho = mpmath.mpf(rho)
    return rho * n * (1 - rho * (1 - rho)) ** (n - 1)


def mp_tail(rho, n):
    return mpmath.nsum(lambda i: mp_rhs(rho, int(i)), [n, mpmath.inf])


def test_rhs_examples():
    assert rhs(0.3, 1) == 0.3
    assert rhs(0.5, 2) == 0.75
    assert rel(rhs(0.5, 30), 15 * 0.75**29) < 1e-15
    assert rel(rhs(0.5, 30), float(mp_rhs(0.5, 30))) < 1e-13
    assert rhs(0.5, 30) == pytest.approx(3.5716418034e-3, rel=1e-10)


def test_epsilon_value():
    assert epsilon(0.5, 30) < 0.02
    assert rel(epsilon(0.5, 30), float(mp_tail(0.5, 30))) < 1e-12


@pytest.mark.parametrize("rho", GRID_RHO)
def test_closed_form_matches_series(rho):
    for n in range(1, 201):
        assert rel(epsilon(rho, n), epsilon_series(rho, n)) < 1e-12


@pytest.mark.parametrize("rho", GRID_RHO)
def test_closed_form_matches_high_precision(rho):
    for n in (1, 5, 30, 100):
        assert rel(epsilon(rho, n), float(mp_tail(rho, n))) < 1e-12


def test_epsilon_dominates_first_term_and_decreases():
    for rho in GRID_RHO:
        vals = [epsilon(rho, n) for n in range(1, 120)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert all(epsilon(rho, n) >= rhs(rho, n) for n in range(1, 120))
        algo = [epsilon_algo(rho, n) for n in range(2, 120)]
        assert all(a >= b for a, b in zip(algo, algo[1:]))
    assert epsilon(0.5, 200) < 1e-20


def test_epsilon_algo():
    for rho in GRID_RHO:
        for n in range(2, 60):
            assert epsilon_algo(rho, n) >= epsilon(rho, n) * (1 - 1e-12)
    plain, comp = epsilon_algo(0.5, 30, compensated=False), epsilon_algo(0.5, 30)
    assert rel(plain, comp) < 1e-12
    exact = mpmath.nsum(lambda i: mpmath.mpf(0.5) * i * i * (i + 1) / 2 * mpmath.mpf(0.75) ** (i - 1),
                        [30, mpmath.inf])
    assert rel(comp, float(exact)) < 1e-12
    assert epsilon_algo(0.5, 400) < 1e-40


def test_diff_lower_bound_examples():
    assert diff_lower_bound(0.5, 2) == 0.5
    assert diff_lower_bound(0.5, 5) == 0.03125
    assert all(diff_lower_bound(r, n) > 0 for r in GRID_RHO for n in range(2, 50))


def test_bernstein():
    up = bernstein_upper(3.394, 7.054, 100000, 450, 0.01)
    assert up == pytest.approx(3.477, abs=1e-3)
    assert up + epsilon(0.5, 30) < 3.497 + 1e-9
    assert bernstein_upper(2.0, 0.0, 10**12, 1e-9, 0.01) == pytest.approx(2.0)
    assert bernstein_lower(3.0, 1.0, 100, 10, 0.05) < 3.0 < bernstein_upper(3.0, 1.0, 100, 10, 0.05)


@pytest.mark.parametrize("args", [(1.0, -1.0, 100, 1, 0.1), (1.0, 1.0, 1, 1, 0.1),
                                  (1.0, 1.0, 100, 0, 0.1), (1.0, 1.0, 100, 1, 1.0)])
def test_bernstein_rejects(args):
    with pytest.raises(ValueError):
        bernstein_upper(*args)


@pytest.mark.parametrize("call", [lambda: rhs(0, 3), lambda: rhs(1, 3), lambda: epsilon(0.5, 0),
                                  lambda: diff_lower_bound(0.5, 1), lambda: epsilon_algo(1.2, 3)])
def test_domain_errors(call):
    with pytest.raises(ValueError):
        call()


def test_interval_directions():
    up = asymptotic_interval("X", 30, 0.5, 3.394, 7.054, 100000, B=450)
    assert up.lower == 3.394 and up.upper == pytest.approx(up.bernstein_upper + epsilon(0.5, 30))
    down = asymptotic_interval("isuEss", 10, 0.5, 0.3, 0.21, 1000)
    assert down.upper == 0.3 and down.lower < 0.3
    algo = asymptotic_interval("Y", 10, 0.5, 1.0, 1.0, 1000, r=1)
    assert algo.epsilon_n == epsilon_algo(0.5, 10)
    assert asymptotic_interval("X", 5, 0.5, 1, 1, 10, eps=0).epsilon_n == 0
    assert default_range("X", 30) == 435 and default_range("I", 5) == 4
    with pytest.raises(ValueError):
        asymptotic_interval("Z", 5, 0.5, 1, 1, 10)


@given(st.floats(0.01, 0.99), st.integers(1, 150))
def test_epsilon_matches_series_property(rho, n):
    assert rel(epsilon(rho, n), epsilon_series(rho, n)) < 1e-11
