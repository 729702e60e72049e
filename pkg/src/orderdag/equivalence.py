"""Essential graphs, interventional essential graphs and class sizes."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from . import _pykernel, kernels
from .graph import (
    ClosureConflict,
    Dag,
    GraphError,
    InterventionSet,
    Pdag,
    iter_bits,
    topological_order,
)

DEFAULT_CAP = 10**7

RULE_IDS = ("V", "INT", "R1", "R2", "R3", "R4")


@dataclass(frozen=True)
class ClosureTrace:
    initial: Pdag
    steps: tuple[tuple[str, tuple[int, int]], ...]
    final: Pdag

    def replay(self) -> Pdag:
        ch = list(self.initial.children)
        nb = list(self.initial.neighbors)
        for rule, (u, v) in self.steps:
            if rule not in RULE_IDS:
                raise ValueError(f"unknown rule id {rule!r}")
            if not nb[u] >> v & 1:
                raise ValueError(f"step {rule} {u}->{v} does not orient an undirected edge")
            nb[u] &= ~(1 << v)
            nb[v] &= ~(1 << u)
            ch[u] |= 1 << v
        return Pdag(self.initial.n, tuple(ch), tuple(nb))

    def to_jsonl(self) -> str:
        import json

        return "".join(json.dumps({"rule": r, "edge": [u, v]}) + "\n" for r, (u, v) in self.steps)


@dataclass(frozen=True)
class MecSize:
    """Class size; when ``capped`` the value is only a lower bound."""

    value: int
    capped: bool = False

    @property
    def log2(self) -> float:
        return math.log2(self.value)


class _CapReached(Exception):
    pass


def meek_closure(p: Pdag) -> Pdag:
    ch, nb = kernels.closure(p.n, p.children, p.neighbors)
    return Pdag(p.n, tuple(ch), tuple(nb))


def closure_trace(p: Pdag, rng: random.Random | None = None) -> ClosureTrace:
    """Closure with every orientation recorded; ``rng`` randomises rule order."""
    steps: list = []
    ch, nb = _pykernel.closure(p.n, p.children, p.neighbors, rng=rng, trace=steps)
    return ClosureTrace(p, tuple(steps), Pdag(p.n, tuple(ch), tuple(nb)))


def essential_graph(g: Dag) -> Pdag:
    ch, nb = kernels.essential(g.n, g.parents, 0)
    return Pdag(g.n, tuple(ch), tuple(nb))


def interventional_essential_graph(g: Dag, targets: InterventionSet | frozenset | set | tuple) -> Pdag:
    if not isinstance(targets, InterventionSet):
        targets = InterventionSet(targets)
    targets.validate(g.n)
    ch, nb = kernels.essential(g.n, g.parents, targets.mask)
    return Pdag(g.n, tuple(ch), tuple(nb))


def essential_trace(g: Dag, targets: InterventionSet | None = None,
                    rng: random.Random | None = None) -> ClosureTrace:
    """Full derivation starting from the undirected skeleton.

    Steps tagged ``V`` come from v-structures, ``INT`` from interventions,
    ``R1``..``R4`` from the closure rules.
    """
    mask = targets.mask if targets is not None else 0
    steps: list = []
    ch, nb = _pykernel.initial_state(g.n, g.parents, mask, trace=steps)
    ch, nb = _pykernel.closure(g.n, ch, nb, rng=rng, trace=steps)
    skel = Pdag(g.n, (0,) * g.n, g.adjacency)
    return ClosureTrace(skel, tuple(steps), Pdag(g.n, tuple(ch), tuple(nb)))


def unoriented_count(p: Pdag) -> int:
    return p.num_undirected


def is_unique(p: Pdag) -> bool:
    return p.num_undirected == 0


def mec_size(p: Pdag, cap: int = DEFAULT_CAP) -> MecSize:
    """Number of DAGs represented by an (interventional) essential graph.

    Product over connected components of the undirected part of the number of
    acyclic, v-structure-free orientations of that component. Each component
    is counted by orienting one edge at a time and closing under the Meek
    rules after every choice.
    """
    if not p.directed_is_acyclic():
        raise GraphError("directed part contains a cycle")
    total = 1
    capped = False
    for comp in p.undirected_components():
        count, hit = count_component_extensions(p, comp, cap)
        total *= count
        capped = capped or hit
    return MecSize(total, capped)


def count_component_extensions(p: Pdag, comp: list[int], cap: int = DEFAULT_CAP) -> tuple[int, bool]:
    index = {v: k for k, v in enumerate(comp)}
    m = len(comp)
    nb = [0] * m
    for v in comp:
        for u in iter_bits(p.neighbors[v]):
            nb[index[v]] |= 1 << index[u]
    found = [0]
    try:
        _extend(m, [0] * m, nb, found, cap)
    except _CapReached:
        return found[0], True
    return found[0], False


def _extend(m: int, ch: list[int], nb: list[int], found: list[int], cap: int) -> None:
    a = next((v for v in range(m) if nb[v]), None)
    if a is None:
        if _is_extension(m, ch):
            found[0] += 1
            if found[0] > cap:
                raise _CapReached
        return
    b = (nb[a] & -nb[a]).bit_length() - 1
    for u, v in ((a, b), (b, a)):
        ch2 = list(ch)
        nb2 = list(nb)
        ch2[u] |= 1 << v
        nb2[u] &= ~(1 << v)
        nb2[v] &= ~(1 << u)
        try:
            ch3, nb3 = kernels.closure(m, ch2, nb2)
        except ClosureConflict:
            continue
        _extend(m, list(ch3), list(nb3), found, cap)


def _is_extension(m: int, ch: list[int]) -> bool:
    """Acyclic with no v-structure (the component was fully undirected)."""
    pa = [0] * m
    for i in range(m):
        for j in iter_bits(ch[i]):
            pa[j] |= 1 << i
    try:
        topological_order(m, pa)
    except GraphError:
        return False
    adj = [ch[i] | pa[i] for i in range(m)]
    for k in range(m):
        for i in iter_bits(pa[k]):
            if pa[k] & ~adj[i] & ~(1 << i):
                return False
    return True
