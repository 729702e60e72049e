"""Gap bounds between finite-n and asymptotic expected metrics, and the
empirical Bernstein upper confidence bound used to combine them with
Monte-Carlo estimates."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

SERIES_RTOL = 1e-18

# direction of monotonicity in n for each metric name
NONDECREASING = {"X", "I", "log2L", "Y", "I_A", "log2L_A"}
NONINCREASING = {"isuEss", "isuEss_A"}
ALGORITHM_METRICS = {"Y", "isuEss_A", "log2L_A", "I_A"}


def _check_rho(rho: float) -> None:
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")


def rhs(rho: float, n: int) -> float:
    """Upper bound on E[X_{n+1}] - E[X_n]: rho * n * (1 - rho(1-rho))^(n-1)."""
    _check_rho(rho)
    if n < 1:
        raise ValueError("n must be at least 1")
    return rho * n * (1.0 - rho * (1.0 - rho)) ** (n - 1)


def epsilon(rho: float, n: int) -> float:
    """Closed form of the tail sum of ``rhs(rho, i)`` over ``i >= n``."""
    _check_rho(rho)
    if n < 1:
        raise ValueError("n must be at least 1")
    x = 1.0 - rho * (1.0 - rho)
    return x**n / (rho * (1.0 - rho) ** 2) + n * x ** (n - 1) / (1.0 - rho)


def _series(term, n: int, compensated: bool = True) -> float:
    terms = []
    total = 0.0
    i = n
    while True:
        t = term(i)
        terms.append(t)
        total += t
        # terms decay geometrically once past the peak
        if i > n and t <= SERIES_RTOL * total and t <= terms[-2]:
            break
        i += 1
    return math.fsum(terms) if compensated else total


def epsilon_series(rho: float, n: int, compensated: bool = True) -> float:
    _check_rho(rho)
    return _series(lambda i: rhs(rho, i), n, compensated)


def epsilon_algo(rho: float, n: int, compensated: bool = True) -> float:
    """Tail sum of ``rho * i^2 (i+1)/2 * (1 - rho(1-rho))^(i-1)`` over ``i >= n``."""
    _check_rho(rho)
    if n < 1:
        raise ValueError("n must be at least 1")
    x = 1.0 - rho * (1.0 - rho)
    return _series(lambda i: rho * i * i * (i + 1) / 2.0 * x ** (i - 1), n, compensated)


def diff_lower_bound(rho: float, n: int) -> float:
    """Lower bound on E[X_n] - E[X_{n-1}]: (n-1) rho (1-rho)^(2n-4)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    return (n - 1) * rho * (1.0 - rho) ** (2 * n - 4)


def _bernstein_terms(V: float, s: int, B: float, delta: float) -> tuple[float, float]:
    if s < 2:
        raise ValueError("need at least two samples")
    if V < 0:
        raise ValueError("variance must be non-negative")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if B <= 0:
        raise ValueError("range bound must be positive")
    log_term = math.log(2.0 / delta)
    return math.sqrt(2.0 * V * log_term / s), B * 7.0 * log_term / (3.0 * (s - 1))


def bernstein_upper(M: float, V: float, s: int, B: float, delta: float) -> float:
    """Empirical Bernstein upper confidence bound on the mean of a [0, B]
    variable, valid with probability 1 - delta (natural logarithm)."""
    dev, rng = _bernstein_terms(V, s, B, delta)
    return M + dev + rng


def bernstein_lower(M: float, V: float, s: int, B: float, delta: float) -> float:
    dev, rng = _bernstein_terms(V, s, B, delta)
    return M - dev - rng


def default_range(metric: str, n: int) -> float:
    if metric in {"isuEss", "isuEss_A"}:
        return 1.0
    if metric in {"I", "I_A"}:
        return float(max(n - 1, 1))
    return n * (n - 1) / 2.0


@dataclass
class BoundReport:
    metric: str
    n: int
    rho: float
    r: int
    s: int
    M: float
    V: float
    B: float
    delta: float
    bernstein_upper: float
    epsilon_n: float
    lower: float
    upper: float
    exact: bool = True

    def to_json_dict(self) -> dict:
        return asdict(self)


def asymptotic_interval(metric: str, n: int, rho: float, M: float, V: float, s: int,
                        delta: float = 0.01, r: int = 0, B: float | None = None,
                        eps: float | None = None, exact: bool = True) -> BoundReport:
    """Interval for the n -> infinity expectation of ``metric``.

    Non-decreasing metrics: [M, Bernstein upper + eps]. The uniqueness
    indicators decrease in n, so the interval flips to
    [Bernstein lower - eps, M]. Algorithm metrics use the algorithm tail sum.
    ``eps`` overrides the tail term (0 gives the bare Bernstein interval).
    """
    if metric not in NONDECREASING | NONINCREASING:
        raise ValueError(f"unknown metric {metric!r}")
    B = default_range(metric, n) if B is None else B
    if eps is None:
        eps = epsilon_algo(rho, n) if metric in ALGORITHM_METRICS else epsilon(rho, n)
    up = bernstein_upper(M, V, s, B, delta)
    if metric in NONINCREASING:
        lower, upper = bernstein_lower(M, V, s, B, delta) - eps, M
    else:
        lower, upper = M, up + eps
    return BoundReport(metric, n, rho, r, s, M, V, B, delta, up, eps, lower, upper, exact)
