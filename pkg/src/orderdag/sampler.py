"""Random order DAGs and coupled (G_n, G_{n+1}) pairs.

The indicator for pair ``i < j`` of sample ``index`` is a pure function of
``(seed, index, i, j)``. Graphs on different vertex counts drawn with the same
seed and index therefore nest: removing the last vertex of the larger graph
gives the smaller one exactly, which is the coupling used throughout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import kernels
from ._pykernel import MASK64, edge_uniform, mix64, sample_key
from .graph import Dag, MAX_VERTICES


@dataclass(frozen=True)
class SampleConfig:
    n: int
    rho: float
    seed: int = 0
    index: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if not 1 <= self.n <= MAX_VERTICES:
            raise ValueError(f"n must lie in [1, {MAX_VERTICES}], got {self.n}")


@dataclass(frozen=True)
class CoupledPair:
    g_small: Dag
    g_big: Dag


def derive_seed(master: int, *parts: int) -> int:
    """Mix integers into a 64-bit seed."""
    h = mix64(master & MASK64)
    for p in parts:
        h = mix64(h ^ (p & MASK64))
    return h


def sample_order_dag(cfg: SampleConfig) -> Dag:
    parents = kernels.sample_parents(cfg.seed, cfg.index, cfg.n, cfg.rho)
    return Dag(cfg.n, tuple(parents), tuple(range(cfg.n)))


def sample_coupled(cfg: SampleConfig) -> CoupledPair:
    big = sample_order_dag(SampleConfig(cfg.n + 1, cfg.rho, cfg.seed, cfg.index))
    return CoupledPair(restrict_prefix(big, cfg.n), big)


def sample_chain(cfg: SampleConfig, k: int) -> list[Dag]:
    """Nested DAGs on ``n, n+1, ..., n+k`` vertices."""
    if k < 0:
        raise ValueError("chain length must be non-negative")
    top = sample_order_dag(SampleConfig(cfg.n + k, cfg.rho, cfg.seed, cfg.index))
    return [restrict_prefix(top, m) for m in range(cfg.n, cfg.n + k + 1)]


def restrict_prefix(g: Dag, m: int) -> Dag:
    """Induced subgraph on vertices ``0..m-1`` of an identity-ordered DAG."""
    if g.order != tuple(range(g.n)):
        raise ValueError("prefix restriction needs the identity order")
    return Dag(m, g.parents[:m], tuple(range(m)))


def sample_permuted_dag(cfg: SampleConfig) -> Dag:
    """Erdos-Renyi skeleton oriented by a uniformly random permutation.

    The direct form of the model; only used to cross-check the identity-order
    sampler statistically.
    """
    key = sample_key(cfg.seed, cfg.index)
    perm = list(range(cfg.n))
    random.Random(key).shuffle(perm)
    pos = {v: k for k, v in enumerate(perm)}
    threshold = cfg.rho * 2.0 ** 53
    edges = []
    for j in range(cfg.n):
        for i in range(j):
            if edge_uniform(key, i, j) < threshold:
                edges.append((i, j) if pos[i] < pos[j] else (j, i))
    return Dag.from_edges(cfg.n, edges, order=perm)
