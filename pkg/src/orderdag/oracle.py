"""Brute-force reference classes built from the definitions alone.

Nothing here uses orientation rules: a class is enumerated as the set of
acyclic orientations of the skeleton whose v-structures match, and the
interventional class filters that by comparing intervened graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    Dag,
    GraphError,
    InterventionSet,
    Pdag,
    intervened_dag,
    iter_bits,
    skeleton,
    v_structures,
)

MAX_ORACLE_EDGES = 25


class OracleGuardError(GraphError):
    pass


@dataclass(frozen=True)
class DagClass:
    members: tuple[Dag, ...]
    skeleton: frozenset[frozenset[int]]

    def __len__(self) -> int:
        return len(self.members)

    def edge_sets(self) -> set[frozenset[tuple[int, int]]]:
        return {frozenset(d.edges) for d in self.members}


def _reaches(children: list[int], src: int, dst: int) -> bool:
    seen = frontier = 1 << src
    while frontier:
        if frontier >> dst & 1:
            return True
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= children[v]
        frontier = nxt & ~seen
        seen |= frontier
    return False


def oracle_mec(g: Dag) -> DagClass:
    pairs = sorted(g.edges)
    pairs = [(min(i, j), max(i, j)) for i, j in pairs]
    if len(pairs) > MAX_ORACLE_EDGES:
        raise OracleGuardError(f"{len(pairs)} edges exceeds enumeration guard {MAX_ORACLE_EDGES}")
    n = g.n
    target = v_structures(g)
    adj = g.adjacency
    children = [0] * n
    parents = [0] * n
    members: list[Dag] = []

    def place(k: int) -> None:
        if k == len(pairs):
            edges = [(i, j) for i in range(n) for j in iter_bits(children[i])]
            d = Dag.from_edges(n, edges)
            if v_structures(d) == target:
                members.append(d)
            return
        i, j = pairs[k]
        for u, v in ((i, j), (j, i)):
            if _reaches(children, v, u):
                continue
            ok = True
            for w in iter_bits(parents[v]):
                if not adj[w] >> u & 1 and (min(u, w), max(u, w), v) not in target:
                    ok = False
                    break
            if not ok:
                continue
            children[u] |= 1 << v
            parents[v] |= 1 << u
            place(k + 1)
            children[u] &= ~(1 << v)
            parents[v] &= ~(1 << u)

    place(0)
    return DagClass(tuple(members), skeleton(g))


def oracle_imec(g: Dag, targets: InterventionSet | frozenset | set | tuple,
                base: DagClass | None = None) -> DagClass:
    if not isinstance(targets, InterventionSet):
        targets = InterventionSet(targets)
    targets.validate(g.n)
    base = oracle_mec(g) if base is None else base
    reference = {}
    for i in targets:
        gi = intervened_dag(g, i)
        reference[i] = (skeleton(gi), v_structures(gi))
    kept = []
    for h in base.members:
        for i in targets:
            hi = intervened_dag(h, i)
            if (skeleton(hi), v_structures(hi)) != reference[i]:
                break
        else:
            kept.append(h)
    return DagClass(tuple(kept), base.skeleton)


def consensus(cls: DagClass, n: int) -> Pdag:
    """Edges on which all members agree are directed; the rest undirected."""
    edge_sets = [set(d.edges) for d in cls.members]
    directed, undirected = [], []
    for pair in cls.skeleton:
        i, j = sorted(pair)
        if all((i, j) in es for es in edge_sets):
            directed.append((i, j))
        elif all((j, i) in es for es in edge_sets):
            directed.append((j, i))
        else:
            undirected.append((i, j))
    return Pdag.from_edges(n, directed, undirected)


def oracle_essential(g: Dag) -> Pdag:
    return consensus(oracle_mec(g), g.n)


def oracle_i_essential(g: Dag, targets) -> Pdag:
    return consensus(oracle_imec(g, targets), g.n)
