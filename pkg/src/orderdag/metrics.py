"""Per-graph identifiability metrics.

Observational: undirected edge count ``X``, uniqueness indicator ``isuEss``,
minimum number of single-node interventions ``I`` and ``log2`` of the class
size. Interventional, for each budget ``r``: the minimum undirected count over
all ``r``-target sets, its indicator and the class size at the minimiser.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from . import kernels
from .design import algorithm_metrics_from_run, greedy_select
from .equivalence import DEFAULT_CAP, essential_graph, interventional_essential_graph, mec_size
from .graph import Dag, InterventionSet, Pdag

DEFAULT_EXACT_LIMIT = 12
DEFAULT_SUBSET_BUDGET = 20000
_BATCH = 512


class BudgetExceeded(RuntimeError):
    """Exact subset search would need more evaluations than allowed."""


def metric_X(g: Dag) -> int:
    return kernels.undirected_counts(g.n, g.parents, [0])[0]


def _candidates(p: Pdag) -> list[int]:
    return [v for v in range(p.n) if p.neighbors[v]]


def _first_minimum(g: Dag, subsets, stop_at: int | None = None) -> tuple[int, tuple[int, ...]] | None:
    """Smallest undirected count over ``subsets`` and the first set reaching it."""
    best: tuple[int, tuple[int, ...]] | None = None
    it = iter(subsets)
    while True:
        chunk = list(itertools.islice(it, _BATCH))
        if not chunk:
            return best
        masks = [sum(1 << v for v in s) for s in chunk]
        for s, c in zip(chunk, kernels.undirected_counts(g.n, g.parents, masks)):
            if best is None or c < best[0]:
                best = (c, s)
                if stop_at is not None and c <= stop_at:
                    return best


def metric_I(g: Dag, exact_limit: int = DEFAULT_EXACT_LIMIT) -> tuple[int, bool]:
    """Minimum number of single-node interventions that orient every edge.

    Chain components of the essential graph are independent: targets inside
    one component orient nothing in another. Each component is solved by
    iterative deepening over target subsets of its own vertices when it has at
    most ``exact_limit`` vertices, otherwise greedily (flagged inexact).
    """
    ess = essential_graph(g)
    x = ess.num_undirected
    total = 0
    exact = True
    for comp in ess.undirected_components():
        edges = sum(ess.neighbors[v].bit_count() for v in comp) // 2
        goal = x - edges
        if len(comp) <= exact_limit:
            total += _component_min(g, comp, goal)
        else:
            total += _component_greedy(g, comp, goal)
            exact = False
    return total, exact


def _component_min(g: Dag, comp: list[int], goal: int) -> int:
    for size in range(1, len(comp)):
        hit = _first_minimum(g, itertools.combinations(comp, size), stop_at=goal)
        if hit is not None and hit[0] <= goal:
            return size
    return len(comp) - 1


def _component_greedy(g: Dag, comp: list[int], goal: int) -> int:
    mask = 0
    steps = 0
    remaining = kernels.undirected_counts(g.n, g.parents, [0])[0]
    while remaining > goal:
        free = [v for v in comp if not mask >> v & 1]
        counts = kernels.undirected_counts(g.n, g.parents, [mask | 1 << v for v in free])
        k = min(range(len(free)), key=lambda q: (counts[q], free[q]))
        mask |= 1 << free[k]
        remaining = counts[k]
        steps += 1
    return steps


def metric_Xr_exact(g: Dag, r: int, budget: int = DEFAULT_SUBSET_BUDGET) -> tuple[int, InterventionSet]:
    """Minimum undirected count over all ``r``-target sets and a minimiser.

    Search is restricted to vertices touching undirected essential-graph
    edges; other vertices orient nothing. Adding targets never un-orients an
    edge, so sets of exactly ``min(r, #candidates)`` candidates suffice; when
    there are fewer than ``r`` candidates the set is padded with the smallest
    remaining vertices. Ties go to the lexicographically smallest candidate set.
    """
    if not 0 <= r <= g.n:
        raise ValueError(f"r={r} outside [0, {g.n}]")
    ess = essential_graph(g)
    cand = _candidates(ess)
    k = min(r, len(cand))
    if math.comb(len(cand), k) > budget:
        raise BudgetExceeded(f"C({len(cand)}, {k}) subsets exceed budget {budget}")
    best = _first_minimum(g, itertools.combinations(cand, k), stop_at=0)
    assert best is not None
    value, chosen = best
    targets = set(chosen)
    pad = (v for v in range(g.n) if v not in cand)
    while len(targets) < r:
        targets.add(next(pad))
    return value, InterventionSet(targets)


def metric_Lr(g: Dag, argmin: InterventionSet, cap: int = DEFAULT_CAP):
    return mec_size(interventional_essential_graph(g, argmin), cap)


@dataclass
class RMetrics:
    X: int
    isuEss: int
    log2L: float
    exact: bool
    capped: bool
    targets: tuple[int, ...] = ()


@dataclass
class MetricRecord:
    n: int
    rho: float
    seed: int
    index: int
    X: int
    isuEss: int
    I: int
    I_exact: bool
    log2L: float
    L_capped: bool
    per_r: dict[int, RMetrics] = field(default_factory=dict)
    greedy: dict[int, RMetrics] = field(default_factory=dict)
    I_A: int = 0

    def columns(self) -> list[str]:
        return record_columns(sorted(self.per_r))

    def row(self) -> list:
        out = [self.n, self.rho, self.seed, self.index, self.X, self.isuEss, self.I,
               int(self.I_exact), self.log2L, int(self.L_capped)]
        for r in sorted(self.per_r):
            m, a = self.per_r[r], self.greedy[r]
            out += [m.X, m.isuEss, m.log2L, int(m.exact), int(m.capped),
                    a.X, a.isuEss, a.log2L, int(a.capped)]
        out.append(self.I_A)
        return out

    def to_json_dict(self) -> dict:
        return dict(zip(self.columns(), self.row()))


def record_columns(r_values) -> list[str]:
    cols = ["n", "rho", "seed", "index", "X", "isuEss", "I", "I_exact", "log2L", "L_capped"]
    for r in sorted(r_values):
        cols += [f"X_r{r}", f"isuEss_r{r}", f"log2L_r{r}", f"exact_r{r}", f"capped_r{r}",
                 f"Y_r{r}", f"isuEss_A_r{r}", f"log2L_A_r{r}", f"capped_A_r{r}"]
    cols.append("I_A")
    return cols


def measure(g: Dag, r_values=(0,), *, rho: float = float("nan"), seed: int = 0, index: int = 0,
            cap: int = DEFAULT_CAP, exact_limit: int = DEFAULT_EXACT_LIMIT,
            subset_budget: int = DEFAULT_SUBSET_BUDGET) -> MetricRecord:
    """All metrics for one graph.

    When an exact ``r``-target search exceeds ``subset_budget`` the greedy
    value is reported instead and flagged inexact (it is an upper bound).
    """
    ess = essential_graph(g)
    size = mec_size(ess, cap)
    i_val, i_exact = metric_I(g, exact_limit)
    run = greedy_select(g, g.n)
    rec = MetricRecord(g.n, rho, seed, index, ess.num_undirected, int(ess.num_undirected == 0),
                       i_val, i_exact, size.log2, size.capped, I_A=len(run.chosen))
    for r in sorted(r_values):
        a = algorithm_metrics_from_run(g, run, r, cap)
        rec.greedy[r] = RMetrics(a.Y, a.isuEss, a.log2L, False, a.L_capped, tuple(run.chosen[:r]))
        try:
            # budgets beyond n mean "intervene everywhere"
            x_r, targets = metric_Xr_exact(g, min(r, g.n), subset_budget)
        except BudgetExceeded:
            rec.per_r[r] = RMetrics(a.Y, a.isuEss, a.log2L, False, a.L_capped, tuple(run.chosen[:r]))
            continue
        lr = metric_Lr(g, targets, cap)
        rec.per_r[r] = RMetrics(x_r, int(x_r == 0), lr.log2, True, lr.capped, tuple(targets))
    return rec
