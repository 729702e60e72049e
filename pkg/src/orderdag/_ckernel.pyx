# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: counter-based sampling, essential-graph seeding and Meek
closure on fixed-width bitsets (up to 8 words, i.e. 512 vertices).

Contract identical to ``orderdag._pykernel``; rows cross the boundary as
Python int bitmasks.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free
from libc.string cimport memset

from orderdag.graph import ClosureConflict

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil

cdef enum:
    MAXW = 8
cdef object MASK64 = (1 << 64) - 1
cdef double TWO53 = 9007199254740992.0


cdef inline uint64_t mix64(uint64_t z) nogil:
    z += 0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef struct State:
    int n
    int W
    uint64_t* ch
    uint64_t* pa
    uint64_t* nb
    uint64_t* adj
    uint64_t* tpa   # true parents
    uint64_t* tch   # true children


cdef int state_alloc(State* s, int n) except -1:
    s.n = n
    s.W = (n + 63) >> 6 if n > 0 else 1
    cdef size_t sz = <size_t>n * s.W if n > 0 else 1
    s.ch = <uint64_t*>calloc(sz * 6, sizeof(uint64_t))
    if s.ch == NULL:
        raise MemoryError()
    s.pa = s.ch + sz
    s.nb = s.pa + sz
    s.adj = s.nb + sz
    s.tpa = s.adj + sz
    s.tch = s.tpa + sz
    return 0


cdef inline void state_free(State* s) nogil:
    free(s.ch)


cdef inline int tb(uint64_t* row, int j) nogil:
    return <int>((row[j >> 6] >> (j & 63)) & 1ULL)


cdef inline void setb(uint64_t* row, int j) nogil:
    row[j >> 6] |= (1ULL << (j & 63))


cdef inline void clrb(uint64_t* row, int j) nogil:
    row[j >> 6] &= ~(1ULL << (j & 63))


cdef int fires(State* s, int a, int b) nogil:
    """1..4 for the first Meek rule orienting a -- b as a -> b, else 0."""
    cdef int W = s.W, w, c, k
    cdef uint64_t* pa_a = s.pa + a * W
    cdef uint64_t* pa_b = s.pa + b * W
    cdef uint64_t* adj_a = s.adj + a * W
    cdef uint64_t* adj_b = s.adj + b * W
    cdef uint64_t* nb_a = s.nb + a * W
    cdef uint64_t* ch_a = s.ch + a * W
    cdef uint64_t* adj_c
    cdef uint64_t* ch_c
    cdef uint64_t sw[MAXW]
    cdef uint64_t word, low
    # R1: c -> a, c not adjacent to b
    for w in range(W):
        if pa_a[w] & ~adj_b[w]:
            return 1
    # R2: a -> c -> b
    for w in range(W):
        if ch_a[w] & pa_b[w]:
            return 2
    # R3: a -- c, a -- d, c -> b, d -> b, c and d non-adjacent
    for w in range(W):
        sw[w] = nb_a[w] & pa_b[w]
    for w in range(W):
        word = sw[w]
        while word:
            c = (w << 6) + __builtin_ctzll(word)
            word &= word - 1
            adj_c = s.adj + c * W
            for k in range(W):
                low = sw[k] & ~adj_c[k]
                if k == (c >> 6):
                    low &= ~(1ULL << (c & 63))
                if low:
                    return 3
    # R4: a -- c, c -> d, d -> b, c not adjacent to b, d adjacent to a
    for w in range(W):
        word = nb_a[w] & ~adj_b[w]
        if w == (b >> 6):
            word &= ~(1ULL << (b & 63))
        while word:
            c = (w << 6) + __builtin_ctzll(word)
            word &= word - 1
            ch_c = s.ch + c * W
            for k in range(W):
                if ch_c[k] & pa_b[k] & adj_a[k]:
                    return 4
    return 0


cdef inline void orient(State* s, int u, int v) nogil:
    cdef int W = s.W
    clrb(s.nb + u * W, v)
    clrb(s.nb + v * W, u)
    setb(s.ch + u * W, v)
    setb(s.pa + v * W, u)


cdef int run_closure(State* s) nogil:
    """Sweep undirected edges until fixpoint. Returns -1 on conflict."""
    cdef int n = s.n, W = s.W, a, b, w, fa, fb, changed = 1
    cdef uint64_t word
    while changed:
        changed = 0
        for a in range(n):
            for w in range(a >> 6, W):
                word = s.nb[a * W + w]
                if w == (a >> 6):
                    word &= ~((2ULL << (a & 63)) - 1ULL)
                while word:
                    b = (w << 6) + __builtin_ctzll(word)
                    word &= word - 1
                    if not tb(s.nb + a * W, b):
                        continue
                    fa = fires(s, a, b)
                    fb = fires(s, b, a)
                    if fa and fb:
                        return -1
                    if fa:
                        orient(s, a, b)
                        changed = 1
                    elif fb:
                        orient(s, b, a)
                        changed = 1
    return 0


cdef void true_children(State* s) nogil:
    """Fill tch and adj from tpa."""
    cdef int n = s.n, W = s.W, i, j, w
    cdef uint64_t word
    memset(s.tch, 0, <size_t>n * W * sizeof(uint64_t))
    for j in range(n):
        for w in range(W):
            word = s.tpa[j * W + w]
            while word:
                i = (w << 6) + __builtin_ctzll(word)
                word &= word - 1
                setb(s.tch + i * W, j)
    for i in range(n * W):
        s.adj[i] = s.tpa[i] | s.tch[i]


cdef void seed_state(State* s, uint64_t* targets) nogil:
    """Orient v-structure edges and target-incident edges; others undirected."""
    cdef int n = s.n, W = s.W, i, k, w, q, hit
    cdef uint64_t word
    cdef uint64_t* pk
    cdef uint64_t* adj_i
    memset(s.ch, 0, <size_t>n * W * sizeof(uint64_t))
    memset(s.pa, 0, <size_t>n * W * sizeof(uint64_t))
    for k in range(n):
        pk = s.tpa + k * W
        for w in range(W):
            word = pk[w]
            while word:
                i = (w << 6) + __builtin_ctzll(word)
                word &= word - 1
                adj_i = s.adj + i * W
                hit = 0
                for q in range(W):
                    if pk[q] & ~adj_i[q] & ~(((1ULL << (i & 63)) if q == (i >> 6) else 0ULL)):
                        hit = 1
                        break
                if hit:
                    setb(s.ch + i * W, k)
                    setb(s.pa + k * W, i)
    if targets != NULL:
        for k in range(n):
            if not tb(targets, k):
                continue
            # incoming edges of k and outgoing edges of k
            for w in range(W):
                word = s.tpa[k * W + w]
                while word:
                    i = (w << 6) + __builtin_ctzll(word)
                    word &= word - 1
                    setb(s.ch + i * W, k)
                    setb(s.pa + k * W, i)
                word = s.tch[k * W + w]
                while word:
                    i = (w << 6) + __builtin_ctzll(word)
                    word &= word - 1
                    setb(s.ch + k * W, i)
                    setb(s.pa + i * W, k)
    for i in range(n * W):
        s.nb[i] = s.adj[i] & ~(s.ch[i] | s.pa[i])


cdef long count_undirected(State* s) nogil:
    cdef long total = 0
    cdef int i
    for i in range(s.n * s.W):
        total += __builtin_popcountll(s.nb[i])
    return total // 2


cdef void load_rows(object rows, int n, int W, uint64_t* dst) except *:
    cdef int v, w
    if W == 1:
        for v in range(n):
            dst[v] = <uint64_t>rows[v]
    else:
        for v in range(n):
            m = rows[v]
            for w in range(W):
                dst[v * W + w] = <uint64_t>((m >> (64 * w)) & MASK64)


cdef void load_mask(object m, int W, uint64_t* dst) except *:
    cdef int w
    for w in range(W):
        dst[w] = <uint64_t>((m >> (64 * w)) & MASK64)


cdef list dump_rows(int n, int W, uint64_t* src):
    cdef int v, w
    out = []
    if W == 1:
        for v in range(n):
            out.append(src[v])
    else:
        for v in range(n):
            m = 0
            for w in range(W - 1, -1, -1):
                m = (m << 64) | src[v * W + w]
            out.append(m)
    return out


cdef void sample_into(State* s, uint64_t seed, uint64_t index, double rho) nogil:
    cdef int n = s.n, W = s.W, i, j
    cdef uint64_t key = mix64(mix64(seed) ^ index)
    cdef uint64_t base
    cdef double threshold = rho * TWO53
    memset(s.tpa, 0, <size_t>n * W * sizeof(uint64_t))
    for j in range(n):
        base = (<uint64_t>j) * (j - 1) // 2
        for i in range(j):
            if <double>(mix64(key ^ (base + i)) >> 11) < threshold:
                setb(s.tpa + j * W, i)


def _check(int n):
    if n < 0 or n > 64 * MAXW:
        raise ValueError(f"vertex count {n} outside [0, {64 * MAXW}]")


def sample_parents(seed, index, int n, double rho):
    _check(n)
    cdef State s
    state_alloc(&s, n)
    try:
        sample_into(&s, <uint64_t>(seed & MASK64), <uint64_t>(index & MASK64), rho)
        return dump_rows(n, s.W, s.tpa)
    finally:
        state_free(&s)


def closure(int n, children, neighbors, rng=None, trace=None):
    if rng is not None or trace is not None:
        from orderdag import _pykernel
        return _pykernel.closure(n, children, neighbors, rng=rng, trace=trace)
    _check(n)
    cdef State s
    cdef int i, j, w
    cdef uint64_t word
    state_alloc(&s, n)
    try:
        load_rows(children, n, s.W, s.ch)
        load_rows(neighbors, n, s.W, s.nb)
        for i in range(n):
            for w in range(s.W):
                word = s.ch[i * s.W + w]
                while word:
                    j = (w << 6) + __builtin_ctzll(word)
                    word &= word - 1
                    setb(s.pa + j * s.W, i)
        for i in range(n * s.W):
            s.adj[i] = s.ch[i] | s.pa[i] | s.nb[i]
        if run_closure(&s) < 0:
            raise ClosureConflict("an undirected edge was forced in both directions")
        return dump_rows(n, s.W, s.ch), dump_rows(n, s.W, s.nb)
    finally:
        state_free(&s)


def essential(int n, parents, targets=0):
    _check(n)
    cdef State s
    cdef uint64_t tw[MAXW]
    state_alloc(&s, n)
    try:
        load_rows(parents, n, s.W, s.tpa)
        true_children(&s)
        load_mask(targets, s.W, tw)
        seed_state(&s, tw)
        if run_closure(&s) < 0:
            raise ClosureConflict("an undirected edge was forced in both directions")
        return dump_rows(n, s.W, s.ch), dump_rows(n, s.W, s.nb)
    finally:
        state_free(&s)


def undirected_counts(int n, parents, target_masks):
    _check(n)
    cdef State s
    cdef uint64_t tw[MAXW]
    cdef int rc
    out = []
    state_alloc(&s, n)
    try:
        load_rows(parents, n, s.W, s.tpa)
        true_children(&s)
        for t in target_masks:
            load_mask(t, s.W, tw)
            with nogil:
                seed_state(&s, tw)
                rc = run_closure(&s)
            if rc < 0:
                raise ClosureConflict("an undirected edge was forced in both directions")
            out.append(count_undirected(&s))
        return out
    finally:
        state_free(&s)


def sample_undirected_counts(seed, int n, double rho, long start, long count):
    _check(n)
    cdef State s
    cdef uint64_t sd = <uint64_t>(seed & MASK64)
    cdef long k
    cdef int rc = 0
    cdef long* buf = <long*>calloc(count if count > 0 else 1, sizeof(long))
    if buf == NULL:
        raise MemoryError()
    state_alloc(&s, n)
    try:
        with nogil:
            for k in range(count):
                sample_into(&s, sd, <uint64_t>(start + k), rho)
                true_children(&s)
                seed_state(&s, NULL)
                rc = run_closure(&s)
                if rc < 0:
                    break
                buf[k] = count_undirected(&s)
        if rc < 0:
            raise ClosureConflict("an undirected edge was forced in both directions")
        return [buf[k] for k in range(count)]
    finally:
        state_free(&s)
        free(buf)
