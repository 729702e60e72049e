"""Pure-Python kernels over int bitsets.

Same contract as the compiled ``_ckernel`` module; used when the extension is
not built and as the engine for traced or order-randomised closures.
"""

from __future__ import annotations

import random

from .graph import ClosureConflict, iter_bits

MASK64 = (1 << 64) - 1
TWO53 = 9007199254740992.0


def mix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def sample_key(seed: int, index: int) -> int:
    return mix64(mix64(seed & MASK64) ^ (index & MASK64))


def edge_uniform(key: int, i: int, j: int) -> int:
    """53-bit uniform integer attached to pair ``i < j`` of one sample."""
    return mix64(key ^ (j * (j - 1) // 2 + i)) >> 11


def sample_parents(seed: int, index: int, n: int, rho: float) -> list[int]:
    key = sample_key(seed, index)
    threshold = rho * TWO53
    parents = []
    for j in range(n):
        pa = 0
        base = j * (j - 1) // 2
        for i in range(j):
            if mix64(key ^ (base + i)) >> 11 < threshold:
                pa |= 1 << i
        parents.append(pa)
    return parents


def _rule(a: int, b: int, ch, pa, nb, adj) -> str | None:
    """Name of the first rule that orients ``a -- b`` as ``a -> b``."""
    if pa[a] & ~adj[b]:
        return "R1"
    if ch[a] & pa[b]:
        return "R2"
    s = nb[a] & pa[b]
    for c in iter_bits(s):
        if s & ~adj[c] & ~(1 << c):
            return "R3"
    for c in iter_bits(nb[a] & ~adj[b] & ~(1 << b)):
        if ch[c] & pa[b] & adj[a]:
            return "R4"
    return None


def closure(n: int, children, neighbors, rng: random.Random | None = None,
            trace: list | None = None) -> tuple[list[int], list[int]]:
    """Meek closure of the pdag given as child / undirected-neighbour masks.

    Worklist over undirected edges; after orienting ``u -> v`` only edges
    whose rule motifs can contain that edge are re-queued. With ``rng`` the
    worklist is consumed in random order. ``trace`` collects
    ``(rule, (tail, head))`` steps.
    """
    ch = list(children)
    nb = list(neighbors)
    pa = [0] * n
    for i in range(n):
        for j in iter_bits(ch[i]):
            pa[j] |= 1 << i
    adj = [ch[i] | pa[i] | nb[i] for i in range(n)]

    work = [(a, b) for a in range(n) for b in iter_bits(nb[a] >> (a + 1) << (a + 1))]
    queued = set(work)
    if rng is None:
        work.reverse()

    def push_incident(x: int) -> None:
        for y in iter_bits(nb[x]):
            e = (x, y) if x < y else (y, x)
            if e not in queued:
                queued.add(e)
                work.append(e)

    while work:
        if rng is not None:
            k = rng.randrange(len(work))
            work[k], work[-1] = work[-1], work[k]
        a, b = work.pop()
        queued.discard((a, b))
        if not nb[a] >> b & 1:
            continue
        fwd = _rule(a, b, ch, pa, nb, adj)
        bwd = _rule(b, a, ch, pa, nb, adj)
        if fwd and bwd:
            raise ClosureConflict(f"edge {a}--{b} forced both ways ({fwd}, {bwd})")
        if not (fwd or bwd):
            continue
        u, v, rule = (a, b, fwd) if fwd else (b, a, bwd)
        nb[u] &= ~(1 << v)
        nb[v] &= ~(1 << u)
        ch[u] |= 1 << v
        pa[v] |= 1 << u
        if trace is not None:
            trace.append((rule, (u, v)))
        push_incident(u)
        push_incident(v)
        for x in iter_bits(nb[u] & adj[v]):
            push_incident(x)
    return ch, nb


def initial_state(n: int, parents, targets: int, trace: list | None = None
                  ) -> tuple[list[int], list[int]]:
    """Orient v-structure edges and edges incident to targets; rest undirected."""
    ch_true = [0] * n
    for j in range(n):
        for i in iter_bits(parents[j]):
            ch_true[i] |= 1 << j
    adj = [parents[v] | ch_true[v] for v in range(n)]
    ch = [0] * n
    for k in range(n):
        pk = parents[k]
        for i in iter_bits(pk):
            if pk & ~adj[i] & ~(1 << i):
                if trace is not None:
                    trace.append(("V", (i, k)))
                ch[i] |= 1 << k
    for t in iter_bits(targets):
        for i in iter_bits(parents[t]):
            if trace is not None and not ch[i] >> t & 1:
                trace.append(("INT", (i, t)))
            ch[i] |= 1 << t
        for j in iter_bits(ch_true[t]):
            if trace is not None and not ch[t] >> j & 1:
                trace.append(("INT", (t, j)))
            ch[t] |= 1 << j
    nb = [0] * n
    for v in range(n):
        oriented = ch[v]
        for u in iter_bits(parents[v]):
            if ch[u] >> v & 1:
                oriented |= 1 << u
        nb[v] = adj[v] & ~oriented
    return ch, nb


def essential(n: int, parents, targets: int = 0) -> tuple[list[int], list[int]]:
    ch, nb = initial_state(n, parents, targets)
    return closure(n, ch, nb)


def undirected_counts(n: int, parents, target_masks) -> list[int]:
    out = []
    for t in target_masks:
        _, nb = essential(n, parents, t)
        out.append(sum(m.bit_count() for m in nb) // 2)
    return out


def sample_undirected_counts(seed: int, n: int, rho: float, start: int, count: int) -> list[int]:
    out = []
    for index in range(start, start + count):
        _, nb = essential(n, sample_parents(seed, index, n, rho), 0)
        out.append(sum(m.bit_count() for m in nb) // 2)
    return out
