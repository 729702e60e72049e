"""Intervention selection on essential graphs: the greedy algorithm and the
downstream-independence machinery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import kernels
from .equivalence import DEFAULT_CAP, interventional_essential_graph, mec_size
from .graph import Dag, InterventionSet, Pdag, iter_bits

Algorithm = Callable[[Dag, int], list[int]]


@dataclass(frozen=True)
class GreedyRun:
    chosen: tuple[int, ...]
    after_each: tuple[Pdag, ...]
    Y: tuple[int, ...]

    def to_json_dict(self) -> dict:
        from .graph import to_json_dict

        return {
            "chosen": list(self.chosen),
            "Y": list(self.Y),
            "after_each": [to_json_dict(p) for p in self.after_each],
        }


def undirected_vertices(p: Pdag) -> list[int]:
    return [v for v in range(p.n) if p.neighbors[v]]


def greedy_select(g: Dag, r: int) -> GreedyRun:
    """Pick, one at a time, the target whose intervention leaves the fewest
    undirected edges given the targets already chosen.

    Scores use the true DAG. Ties go to the smallest index. Only vertices
    touching an undirected edge are scored: any such vertex orients at least
    that edge, every other vertex orients nothing, so a zero-gain step can
    only happen once the graph is fully oriented and the run stops there.
    """
    if r < 0:
        raise ValueError("r must be non-negative")
    chosen: list[int] = []
    after: list[Pdag] = []
    ys: list[int] = []
    current = interventional_essential_graph(g, ())
    mask = 0
    for _ in range(r):
        cand = undirected_vertices(current)
        if not cand:
            break
        counts = kernels.undirected_counts(g.n, g.parents, [mask | 1 << v for v in cand])
        best = min(range(len(cand)), key=lambda k: (counts[k], cand[k]))
        v = cand[best]
        chosen.append(v)
        mask |= 1 << v
        current = interventional_essential_graph(g, InterventionSet(chosen))
        after.append(current)
        ys.append(current.num_undirected)
    return GreedyRun(tuple(chosen), tuple(after), tuple(ys))


def greedy_targets(g: Dag, r: int) -> list[int]:
    return list(greedy_select(g, r).chosen)


def largest_index_targets(g: Dag, r: int) -> list[int]:
    """Deliberately not downstream-independent: always the top indices."""
    return list(range(g.n - 1, max(g.n - 1 - r, -1), -1))


def strip_downstream(p: Pdag) -> tuple[Pdag, frozenset[int]]:
    """Repeatedly drop vertices with no undirected and no outgoing edges.

    The reduced graph keeps vertex labels; removed vertices become isolated.
    """
    removed = 0
    changed = True
    while changed:
        changed = False
        for v in range(p.n):
            if removed >> v & 1:
                continue
            if not p.neighbors[v] and not p.children[v] & ~removed:
                removed |= 1 << v
                changed = True
    keep = ~removed
    ch = tuple(c & keep if not removed >> i & 1 else 0 for i, c in enumerate(p.children))
    nb = tuple(b if not removed >> i & 1 else 0 for i, b in enumerate(p.neighbors))
    return Pdag(p.n, ch, nb), frozenset(iter_bits(removed))


def check_downstream_independence(algorithm: Algorithm, g: Dag, r: int = 2) -> bool:
    """Whether ``algorithm`` picks the same targets on ``g`` as on ``g`` with
    its downstream part removed (removed vertices skipped on the full graph)."""
    ess = interventional_essential_graph(g, ())
    _, removed = strip_downstream(ess)
    full = [v for v in algorithm(g, r) if v not in removed]
    sub, labels = g.induced(v for v in range(g.n) if v not in removed)
    reduced = [labels[v] for v in algorithm(sub, r)]
    return full == reduced


@dataclass(frozen=True)
class AlgorithmMetrics:
    Y: int
    isuEss: int
    log2L: float
    L_capped: bool
    I_A: int


def metrics_after_algorithm(g: Dag, r: int, cap: int = DEFAULT_CAP) -> AlgorithmMetrics:
    full = greedy_select(g, g.n)
    return algorithm_metrics_from_run(g, full, r, cap)


def algorithm_metrics_from_run(g: Dag, full: GreedyRun, r: int, cap: int = DEFAULT_CAP) -> AlgorithmMetrics:
    """Metrics after the first ``r`` picks of a run taken to full orientation."""
    if r == 0 or not full.chosen:
        p = interventional_essential_graph(g, ())
    else:
        p = full.after_each[min(r, len(full.chosen)) - 1]
    size = mec_size(p, cap)
    y = p.num_undirected
    return AlgorithmMetrics(y, int(y == 0), size.log2, size.capped, len(full.chosen))
