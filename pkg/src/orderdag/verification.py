"""Differential checks of the closure-based classes against the oracle."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterator

from .equivalence import essential_graph, interventional_essential_graph, mec_size
from .graph import Dag, GraphError, skeleton, v_structures
from .oracle import consensus, oracle_imec, oracle_mec
from .sampler import SampleConfig, sample_permuted_dag


@dataclass
class VerifyReport:
    checked: int = 0
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def all_dags(n: int) -> Iterator[Dag]:
    """Every labelled DAG on ``n`` vertices (each pair absent, forward or backward)."""
    pairs = list(itertools.combinations(range(n), 2))
    for code in itertools.product((0, 1, 2), repeat=len(pairs)):
        edges = [(i, j) if c == 1 else (j, i) for (i, j), c in zip(pairs, code) if c]
        try:
            yield Dag.from_edges(n, edges)
        except GraphError:
            continue


def verify_observational(max_n: int = 5) -> VerifyReport:
    report = VerifyReport()
    for n in range(1, max_n + 1):
        cache: dict = {}
        for g in all_dags(n):
            key = (skeleton(g), v_structures(g))
            if key not in cache:
                cls = oracle_mec(g)
                cache[key] = (consensus(cls, n), len(cls))
            expected, size = cache[key]
            got = essential_graph(g)
            report.checked += 1
            if got != expected:
                report.mismatches.append(f"essential graph differs for {g.edges}")
            elif (m := mec_size(got)).value != size or m.capped:
                report.mismatches.append(f"class size {m.value} != {size} for {g.edges}")
    return report


def verify_interventional(count: int = 1000, max_n: int = 7, max_targets: int = 2,
                          seed: int = 0) -> VerifyReport:
    """Random DAGs (random n <= max_n and density) with every target set of
    size <= max_targets."""
    report = VerifyReport()
    rng = random.Random(seed)
    for k in range(count):
        n = rng.randint(1, max_n)
        g = sample_permuted_dag(SampleConfig(n, rng.random(), seed, k))
        base = oracle_mec(g)
        for size in range(max_targets + 1):
            for targets in itertools.combinations(range(n), size):
                cls = oracle_imec(g, targets, base)
                got = interventional_essential_graph(g, targets)
                report.checked += 1
                if got != consensus(cls, n):
                    report.mismatches.append(f"I-essential graph differs for {g.edges}, I={targets}")
                elif (m := mec_size(got)).value != len(cls) or m.capped:
                    report.mismatches.append(
                        f"I-class size {m.value} != {len(cls)} for {g.edges}, I={targets}")
    return report
