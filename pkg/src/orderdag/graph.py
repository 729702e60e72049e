"""Core graph types: DAGs, partially directed graphs and intervention sets.

Adjacency is stored as per-vertex bitsets (Python ints), so neighbourhood
intersections in the closure rules are single integer operations.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

MAX_VERTICES = 512


class GraphError(ValueError):
    """Raised for structurally invalid graphs or out-of-range vertices."""


class ClosureConflict(RuntimeError):
    """An undirected edge was forced in both directions during closure.

    Valid essential-graph inputs never produce this; it signals a bug or a
    malformed input rather than a recoverable condition.
    """


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_set(mask: int) -> frozenset[int]:
    return frozenset(iter_bits(mask))


def set_to_bits(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def _check_n(n: int, max_n: int | None) -> None:
    limit = MAX_VERTICES if max_n is None else max_n
    if not 0 <= n <= limit:
        raise GraphError(f"vertex count {n} outside [0, {limit}]")


@dataclass(frozen=True)
class Dag:
    """A DAG over vertices ``0..n-1``.

    ``parents[j]`` is a bitmask with bit ``i`` set iff ``i -> j``. ``order``
    is the generating total order (ancestors first); every edge respects it.
    """

    n: int
    parents: tuple[int, ...]
    order: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        _check_n(self.n, None)
        if len(self.parents) != self.n:
            raise GraphError("parents must have one entry per vertex")
        if not self.order:
            object.__setattr__(self, "order", tuple(range(self.n)))
        if sorted(self.order) != list(range(self.n)):
            raise GraphError("order must be a permutation of 0..n-1")
        full = (1 << self.n) - 1
        position = self.position
        for j, pa in enumerate(self.parents):
            if pa & ~full or pa >> j & 1:
                raise GraphError(f"invalid parent set for vertex {j}")
            for i in iter_bits(pa):
                if position[i] >= position[j]:
                    raise GraphError(f"edge {i}->{j} violates the total order")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   order: Iterable[int] | None = None) -> Dag:
        parents = [0] * n
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise GraphError(f"bad edge {i}->{j}")
            parents[j] |= 1 << i
        if order is None:
            order = topological_order(n, parents)
        return cls(n, tuple(parents), tuple(order))

    @cached_property
    def position(self) -> tuple[int, ...]:
        pos = [0] * self.n
        for k, v in enumerate(self.order):
            pos[v] = k
        return tuple(pos)

    @cached_property
    def children(self) -> tuple[int, ...]:
        ch = [0] * self.n
        for j, pa in enumerate(self.parents):
            for i in iter_bits(pa):
                ch[i] |= 1 << j
        return tuple(ch)

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        return tuple(p | c for p, c in zip(self.parents, self.children))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for j, pa in enumerate(self.parents) for i in iter_bits(pa))

    @property
    def num_edges(self) -> int:
        return sum(pa.bit_count() for pa in self.parents)

    def parent_set(self, j: int) -> frozenset[int]:
        return bits_to_set(self.parents[j])

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.parents[j] >> i & 1)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i] >> j & 1)

    def induced(self, keep: Iterable[int]) -> tuple[Dag, list[int]]:
        """Induced subgraph relabelled to ``0..m-1``; also returns new->old map."""
        kept = sorted(set(keep))
        index = {v: k for k, v in enumerate(kept)}
        parents = []
        for v in kept:
            parents.append(set_to_bits(index[u] for u in iter_bits(self.parents[v]) if u in index))
        order = [index[v] for v in self.order if v in index]
        return Dag(len(kept), tuple(parents), tuple(order)), kept

    def to_pdag(self) -> Pdag:
        return Pdag(self.n, self.children, (0,) * self.n)


def topological_order(n: int, parents: list[int] | tuple[int, ...]) -> list[int]:
    remaining = list(parents)
    done = 0
    order = []
    while len(order) < n:
        ready = [v for v in range(n) if not done >> v & 1 and not remaining[v] & ~done]
        if not ready:
            raise GraphError("graph contains a directed cycle")
        for v in ready:
            order.append(v)
        done |= set_to_bits(ready)
    return order


@dataclass(frozen=True)
class Pdag:
    """Partially directed graph.

    ``children[i]`` has bit ``j`` set for each directed edge ``i -> j``;
    ``neighbors[i]`` has bit ``j`` set for each undirected edge ``i -- j``
    (stored symmetrically).
    """

    n: int
    children: tuple[int, ...]
    neighbors: tuple[int, ...]

    def __post_init__(self) -> None:
        _check_n(self.n, None)
        if len(self.children) != self.n or len(self.neighbors) != self.n:
            raise GraphError("children/neighbors must have one entry per vertex")
        full = (1 << self.n) - 1
        for i in range(self.n):
            ch, nb = self.children[i], self.neighbors[i]
            if (ch | nb) & ~full or (ch | nb) >> i & 1:
                raise GraphError(f"invalid adjacency for vertex {i}")
            if ch & nb:
                raise GraphError(f"vertex {i} has an edge both directed and undirected")
            for j in iter_bits(nb):
                if not self.neighbors[j] >> i & 1:
                    raise GraphError(f"undirected edge {i}--{j} is not symmetric")
                if self.children[j] >> i & 1:
                    raise GraphError(f"edge {i}--{j} also directed {j}->{i}")
            for j in iter_bits(ch):
                if self.children[j] >> i & 1:
                    raise GraphError(f"edge {i}<->{j} directed both ways")

    @classmethod
    def from_edges(cls, n: int, directed: Iterable[tuple[int, int]] = (),
                   undirected: Iterable[tuple[int, int]] = ()) -> Pdag:
        ch = [0] * n
        nb = [0] * n
        for i, j in directed:
            ch[i] |= 1 << j
        for i, j in undirected:
            nb[i] |= 1 << j
            nb[j] |= 1 << i
        return cls(n, tuple(ch), tuple(nb))

    @cached_property
    def parents(self) -> tuple[int, ...]:
        pa = [0] * self.n
        for i, ch in enumerate(self.children):
            for j in iter_bits(ch):
                pa[j] |= 1 << i
        return tuple(pa)

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        return tuple(c | p | u for c, p, u in zip(self.children, self.parents, self.neighbors))

    @property
    def directed(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for i, ch in enumerate(self.children) for j in iter_bits(ch))

    @property
    def undirected(self) -> frozenset[tuple[int, int]]:
        return frozenset((i, j) for i, nb in enumerate(self.neighbors)
                         for j in iter_bits(nb >> (i + 1) << (i + 1)))

    @property
    def num_undirected(self) -> int:
        return sum(nb.bit_count() for nb in self.neighbors) // 2

    def skeleton(self) -> frozenset[frozenset[int]]:
        return frozenset(frozenset(e) for e in self.directed | self.undirected)

    def undirected_components(self) -> list[list[int]]:
        """Vertex sets of connected components of the undirected part (size >= 2)."""
        seen = 0
        comps = []
        for v in range(self.n):
            if seen >> v & 1 or not self.neighbors[v]:
                continue
            comp = frontier = 1 << v
            while frontier:
                nxt = 0
                for u in iter_bits(frontier):
                    nxt |= self.neighbors[u]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            comps.append(sorted(iter_bits(comp)))
        return comps

    def directed_is_acyclic(self) -> bool:
        try:
            topological_order(self.n, self.parents)
        except GraphError:
            return False
        return True


@dataclass(frozen=True)
class InterventionSet:
    """Targets of perfect single-node interventions."""

    targets: frozenset[int]

    def __init__(self, targets: Iterable[int] = ()):
        object.__setattr__(self, "targets", frozenset(targets))

    def validate(self, n: int) -> None:
        bad = [t for t in self.targets if not 0 <= t < n]
        if bad:
            raise GraphError(f"intervention targets out of range: {sorted(bad)}")

    @property
    def mask(self) -> int:
        return set_to_bits(self.targets)

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self.targets))

    def __len__(self) -> int:
        return len(self.targets)


def skeleton(g: Dag) -> frozenset[frozenset[int]]:
    return frozenset(frozenset((i, j)) for i, j in g.edges)


def v_structures(g: Dag) -> frozenset[tuple[int, int, int]]:
    """Uncovered colliders ``i -> k <- j`` with ``i < j`` non-adjacent."""
    out = set()
    for k, pa in enumerate(g.parents):
        for i in iter_bits(pa):
            for j in iter_bits(pa >> (i + 1) << (i + 1)):
                if not g.adjacency[i] >> j & 1:
                    out.add((i, j, k))
    return frozenset(out)


def intervened_dag(g: Dag, i: int) -> Dag:
    if not 0 <= i < g.n:
        raise GraphError(f"vertex {i} out of range")
    parents = list(g.parents)
    parents[i] = 0
    return Dag(g.n, tuple(parents), g.order)


# serialization -----------------------------------------------------------

def to_json_dict(g: Dag | Pdag) -> dict:
    if isinstance(g, Dag):
        return {"n": g.n, "directed": [list(e) for e in g.edges], "undirected": []}
    return {
        "n": g.n,
        "directed": [list(e) for e in sorted(g.directed)],
        "undirected": [list(e) for e in sorted(g.undirected)],
    }


def to_json(g: Dag | Pdag) -> str:
    return json.dumps(to_json_dict(g))


def pdag_from_json(data: str | dict) -> Pdag:
    if isinstance(data, str):
        data = json.loads(data)
    return Pdag.from_edges(int(data["n"]),
                           (tuple(e) for e in data.get("directed", [])),
                           (tuple(e) for e in data.get("undirected", [])))


def dag_from_json(data: str | dict) -> Dag:
    if isinstance(data, str):
        data = json.loads(data)
    if data.get("undirected"):
        raise GraphError("a DAG cannot contain undirected edges")
    return Dag.from_edges(int(data["n"]), (tuple(e) for e in data["directed"]))


def to_edge_list(g: Dag | Pdag) -> str:
    d = to_json_dict(g)
    lines = [f"# n = {d['n']}"]
    lines += [f"{i} -> {j}" for i, j in d["directed"]]
    lines += [f"{i} -- {j}" for i, j in d["undirected"]]
    return "\n".join(lines) + "\n"


_EDGE_RE = re.compile(r"^\s*(\d+)\s*(->|--)\s*(\d+)\s*$")
_HEADER_RE = re.compile(r"^\s*#\s*n\s*=\s*(\d+)\s*$")


def pdag_from_edge_list(text: str) -> Pdag:
    n = None
    directed, undirected = [], []
    top = -1
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _HEADER_RE.match(line)
        if m:
            n = int(m.group(1))
            continue
        if line.lstrip().startswith("#"):
            continue
        m = _EDGE_RE.match(line)
        if not m:
            raise GraphError(f"line {lineno}: cannot parse {line!r}")
        i, j = int(m.group(1)), int(m.group(3))
        (directed if m.group(2) == "->" else undirected).append((i, j))
        top = max(top, i, j)
    if n is None:
        n = top + 1
    return Pdag.from_edges(n, directed, undirected)


def dag_from_edge_list(text: str) -> Dag:
    p = pdag_from_edge_list(text)
    if p.undirected:
        raise GraphError("a DAG cannot contain undirected edges")
    return Dag.from_edges(p.n, p.directed)
