# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled search kernels; bit-identical twin of _pykernel (see its docstring).

Base-case size is capped at 128 so layouts fit u8 positions and solution
vectors fit two 64-bit words; callers enforce the cap.
"""

from libc.stdint cimport int16_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc, realloc

import struct

import numpy as np

BACKEND_NAME = "native"

cdef extern from *:
    """
    #include <stdint.h>
    static inline int mph_popcount64(uint64_t x) {
    #if defined(__GNUC__) || defined(__clang__)
        return __builtin_popcountll(x);
    #else
        x = x - ((x >> 1) & 0x5555555555555555ULL);
        x = (x & 0x3333333333333333ULL) + ((x >> 2) & 0x3333333333333333ULL);
        x = (x + (x >> 4)) & 0x0f0f0f0f0f0f0f0fULL;
        return (int)((x * 0x0101010101010101ULL) >> 56);
    #endif
    }
    """
    int mph_popcount64(uint64_t x) nogil

cdef enum:
    MAXN = 128

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15UL
cdef uint64_t C_CAND0 = 0x243F6A8885A308D3UL
cdef uint64_t C_CAND1 = 0x13198A2E03707344UL
cdef uint64_t C_RETR = 0xA4093822299F31D0UL
cdef uint64_t C_PAIR = 0xBE5466CF34E90C6CUL


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9UL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBUL
    return z ^ (z >> 31)


cdef inline uint64_t tweak(uint64_t seed, uint64_t stream, uint64_t counter) nogil:
    return mix64(seed + stream + counter * GOLDEN)


cdef inline uint64_t derive(uint64_t hi, uint64_t lo, uint64_t tw) nogil:
    return mix64(mix64(lo ^ tw) ^ hi)


cdef inline uint64_t pos_reduce(uint64_t value, uint64_t n) nogil:
    return ((value >> 32) * n) >> 32


cdef inline uint64_t pair_seed_c(uint64_t s0, uint64_t s1) nogil:
    return mix64(mix64(s0 + C_PAIR) + s1 * GOLDEN)


# ---------------------------------------------------------------- union-find

cdef struct UF:
    int16_t parent[MAXN]
    int16_t nodes[MAXN]
    int16_t edges[MAXN]


cdef inline void uf_reset(UF* uf, int n) nogil:
    cdef int i
    for i in range(n):
        uf.parent[i] = i
        uf.nodes[i] = 1
        uf.edges[i] = 0


cdef inline int uf_find(UF* uf, int x) nogil:
    while uf.parent[x] != x:
        uf.parent[x] = uf.parent[uf.parent[x]]
        x = uf.parent[x]
    return x


cdef inline bint uf_add_ok(UF* uf, int a, int c) nogil:
    """Add an edge; False as soon as a component holds more edges than nodes."""
    cdef int ra = uf_find(uf, a)
    cdef int rc = uf_find(uf, c)
    cdef int t
    if ra == rc:
        uf.edges[ra] += 1
        return uf.edges[ra] <= uf.nodes[ra]
    if uf.nodes[ra] < uf.nodes[rc]:
        t = ra
        ra = rc
        rc = t
    uf.parent[rc] = ra
    uf.nodes[ra] += uf.nodes[rc]
    uf.edges[ra] += uf.edges[rc] + 1
    return uf.edges[ra] <= uf.nodes[ra]


cdef int count_comps(UF* uf, int n) nogil:
    cdef int i, c = 0
    for i in range(n):
        if uf_find(uf, i) == i:
            c += 1
    return c


# ------------------------------------------------------- GF(2) linear solve
# Augmented rows are 3 words each (k solution bits plus the rhs bit at k),
# stored flat: row i occupies aug[3*i .. 3*i+2].

cdef int solve_words(uint64_t* aug, int m, int k, uint64_t* x0, uint64_t* x1) nogil:
    """solve_bits twin; returns 1 and writes the x words, or 0 if inconsistent."""
    cdef int rank = 0, col, i, piv, w, r
    cdef int pivcol[MAXN]
    cdef uint64_t tmp, bit
    for col in range(k):
        piv = -1
        for i in range(rank, m):
            if (aug[3 * i + (col >> 6)] >> (col & 63)) & 1:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            for w in range(3):
                tmp = aug[3 * rank + w]
                aug[3 * rank + w] = aug[3 * piv + w]
                aug[3 * piv + w] = tmp
        for i in range(rank + 1, m):
            if (aug[3 * i + (col >> 6)] >> (col & 63)) & 1:
                for w in range(3):
                    aug[3 * i + w] ^= aug[3 * rank + w]
        pivcol[rank] = col
        rank += 1
    for i in range(rank, m):
        if aug[3 * i] | aug[3 * i + 1] | aug[3 * i + 2]:
            return 0
    x0[0] = 0
    x1[0] = 0
    # x only ever gains bits at pivot columns (< k), so the rhs bit at k and
    # any free columns never contribute to the masked popcounts below.
    for r in range(rank - 1, -1, -1):
        col = pivcol[r]
        bit = (aug[3 * r + (k >> 6)] >> (k & 63)) & 1
        bit ^= mph_popcount64(aug[3 * r] & x0[0]) & 1
        bit ^= mph_popcount64(aug[3 * r + 1] & x1[0]) & 1
        if bit:
            if col < 64:
                x0[0] |= <uint64_t>1 << col
            else:
                x1[0] |= <uint64_t>1 << (col - 64)
    return 1


cdef void build_system(uint8_t* us, uint8_t* vs, uint64_t* hi, uint64_t* lo,
                       int n, int b, uint64_t rseed, uint64_t* aug) nogil:
    """Fold incidence x retrieval rows; augment with the parity rhs at bit b."""
    cdef int j, a, c
    cdef int kw = b >> 6
    cdef int kb = b & 63
    cdef uint64_t r0, r1, tw0, tw1
    for j in range(3 * n):
        aug[j] = 0
    tw0 = tweak(rseed, C_RETR, 0)
    tw1 = tweak(rseed, C_RETR, 1)
    for j in range(n):
        # the +1 of the parity vector, one per node
        aug[3 * j + kw] ^= <uint64_t>1 << kb
    for j in range(n):
        a = us[j]
        c = vs[j]
        aug[3 * a + kw] ^= <uint64_t>1 << kb  # 0-candidate count parity
        if a != c:
            r0 = derive(hi[j], lo[j], tw0)
            r1 = derive(hi[j], lo[j], tw1) if b > 64 else 0
            if b < 64:
                r0 &= (<uint64_t>1 << b) - 1
            elif 64 < b < 128:
                r1 &= (<uint64_t>1 << (b - 64)) - 1
            aug[3 * a] ^= r0
            aug[3 * a + 1] ^= r1
            aug[3 * c] ^= r0
            aug[3 * c + 1] ^= r1


cdef _x_bytes(uint64_t x0, uint64_t x1, int b):
    return struct.pack("<QQ", x0, x1)[:(b + 7) // 8]


# --------------------------------------------------------------- plain loop

def plain_construct(hi, lo, int n, int b, long long max_seeds, long long start_seed=0):
    cdef uint64_t[::1] hv = np.ascontiguousarray(hi, dtype=np.uint64)
    cdef uint64_t[::1] lv = np.ascontiguousarray(lo, dtype=np.uint64)
    if n < 1 or n > MAXN or hv.shape[0] != n or lv.shape[0] != n or b < 0 or b > n:
        raise ValueError("bad kernel arguments")
    cdef UF uf
    cdef uint8_t us[MAXN]
    cdef uint8_t vs[MAXN]
    cdef uint64_t aug[3 * MAXN]
    cdef uint64_t tw0, tw1, found_seed = 0, x0 = 0, x1 = 0
    cdef long long seed, raw = 0, pf = 0, solved = 0, unsolvable = 0
    cdef int j, ok, found = 0
    with nogil:
        for seed in range(start_seed, start_seed + max_seeds):
            raw += 1
            tw0 = tweak(<uint64_t>seed, C_CAND0, 0)
            tw1 = tweak(<uint64_t>seed, C_CAND1, 0)
            uf_reset(&uf, n)
            ok = 1
            for j in range(n):
                us[j] = <uint8_t>pos_reduce(derive(hv[j], lv[j], tw0), <uint64_t>n)
                vs[j] = <uint8_t>pos_reduce(derive(hv[j], lv[j], tw1), <uint64_t>n)
                if not uf_add_ok(&uf, us[j], vs[j]):
                    ok = 0
                    break
            if not ok:
                continue
            pf += 1
            build_system(us, vs, &hv[0], &lv[0], n, b, <uint64_t>seed, aug)
            if solve_words(aug, n, b, &x0, &x1):
                solved += 1
                found = 1
                found_seed = <uint64_t>seed
                break
            unsolvable += 1
    stats = (raw, 0, 0, 0, pf, solved, unsolvable)
    if not found:
        return False, 0, b"", stats
    return True, int(found_seed), _x_bytes(x0, x1, b), stats


def plain_shockhash(hi, lo, int n, long long max_seeds, long long start_seed=0):
    cdef uint64_t[::1] hv = np.ascontiguousarray(hi, dtype=np.uint64)
    cdef uint64_t[::1] lv = np.ascontiguousarray(lo, dtype=np.uint64)
    if n < 1 or n > MAXN or hv.shape[0] != n or lv.shape[0] != n:
        raise ValueError("bad kernel arguments")
    cdef UF uf
    cdef uint64_t tw0, tw1, found_seed = 0
    cdef long long seed, raw = 0
    cdef int j, ok, a, c, found = 0
    with nogil:
        for seed in range(start_seed, start_seed + max_seeds):
            raw += 1
            tw0 = tweak(<uint64_t>seed, C_CAND0, 0)
            tw1 = tweak(<uint64_t>seed, C_CAND1, 0)
            uf_reset(&uf, n)
            ok = 1
            for j in range(n):
                a = <int>pos_reduce(derive(hv[j], lv[j], tw0), <uint64_t>n)
                c = <int>pos_reduce(derive(hv[j], lv[j], tw1), <uint64_t>n)
                if not uf_add_ok(&uf, a, c):
                    ok = 0
                    break
            if ok:
                found = 1
                found_seed = <uint64_t>seed
                break
    if found:
        return True, int(found_seed), (raw, 0, 0, 0, 1, 1, 0)
    return False, 0, (raw, 0, 0, 0, 0, 0, 0)


# ----------------------------------------------------------- bipartite loop

cdef int bip_layout(uint64_t* hi, uint64_t* lo, int n, int half, uint64_t seed,
                    uint64_t stream, int offset, uint8_t* out) nogil:
    """Fill one side's layout; returns surjectivity onto the side's range."""
    cdef uint64_t tw = tweak(seed, stream, 0)
    cdef uint64_t mask = 0
    cdef uint64_t full
    cdef int j, p
    for j in range(n):
        p = <int>pos_reduce(derive(hi[j], lo[j], tw), <uint64_t>half)
        out[j] = <uint8_t>(offset + p)
        mask |= <uint64_t>1 << p
    if half == 64:
        full = <uint64_t>0xFFFFFFFFFFFFFFFFUL
    else:
        full = (<uint64_t>1 << half) - 1
    return mask == full


cdef inline bint bip_pf(UF* uf, uint8_t* l0, uint8_t* l1, int n) nogil:
    cdef int j
    uf_reset(uf, n)
    for j in range(n):
        if not uf_add_ok(uf, l0[j], l1[j]):
            return False
    return True


def _bip_search_native(hi, lo, int n, int b, long long max_seeds,
                       bint do_solve, bint want_components):
    cdef uint64_t[::1] hv = np.ascontiguousarray(hi, dtype=np.uint64)
    cdef uint64_t[::1] lv = np.ascontiguousarray(lo, dtype=np.uint64)
    if (n < 2 or n > MAXN or n % 2 or hv.shape[0] != n or lv.shape[0] != n
            or b < 0 or b > n):
        raise ValueError("bad kernel arguments")
    cdef int half = n // 2
    cdef UF uf
    cdef uint8_t l0[MAXN]
    cdef uint64_t aug[3 * MAXN]
    # growable store of admitted side-1 layouts and their seed values
    cdef size_t cap = 64
    cdef uint8_t* layouts = <uint8_t*>malloc(cap * n)
    cdef uint64_t* seeds1 = <uint64_t*>malloc(cap * sizeof(uint64_t))
    cdef uint8_t* tmp_l
    cdef uint64_t* tmp_s
    cdef size_t n1 = 0, t
    cdef long long c, raw = 0, adm0 = 0, pairs = 0, pf = 0
    cdef long long solved = 0, unsolvable = 0
    cdef int found = 0, comps = 0, memfail = 0
    cdef uint64_t s0 = 0, s1 = 0, x0 = 0, x1 = 0, ps
    if layouts == NULL or seeds1 == NULL:
        free(layouts)
        free(seeds1)
        raise MemoryError()
    try:
        with nogil:
            for c in range(max_seeds):
                raw += 1
                if n1 == cap:
                    cap *= 2
                    tmp_l = <uint8_t*>realloc(layouts, cap * n)
                    if tmp_l != NULL:
                        layouts = tmp_l
                    tmp_s = <uint64_t*>realloc(seeds1, cap * sizeof(uint64_t))
                    if tmp_s != NULL:
                        seeds1 = tmp_s
                    if tmp_l == NULL or tmp_s == NULL:
                        memfail = 1
                        break
                # side 1 first so the self pair (c, c) is available below
                if bip_layout(&hv[0], &lv[0], n, half, <uint64_t>c, C_CAND1,
                              half, layouts + n1 * n):
                    seeds1[n1] = <uint64_t>c
                    n1 += 1
                if not bip_layout(&hv[0], &lv[0], n, half, <uint64_t>c, C_CAND0,
                                  0, l0):
                    continue
                adm0 += 1
                for t in range(n1):
                    pairs += 1
                    if not bip_pf(&uf, l0, layouts + t * n, n):
                        continue
                    pf += 1
                    if not do_solve:
                        found = 1
                        s0 = <uint64_t>c
                        s1 = seeds1[t]
                        if want_components:
                            comps = count_comps(&uf, n)
                        solved = 1
                        break
                    ps = pair_seed_c(<uint64_t>c, seeds1[t])
                    build_system(l0, layouts + t * n, &hv[0], &lv[0], n, b, ps, aug)
                    if solve_words(aug, n, b, &x0, &x1):
                        solved += 1
                        found = 1
                        s0 = <uint64_t>c
                        s1 = seeds1[t]
                        break
                    unsolvable += 1
                if found:
                    break
    finally:
        free(layouts)
        free(seeds1)
    if memfail:
        raise MemoryError()
    stats = (raw, adm0, n1, pairs, pf, solved, unsolvable)
    if not found:
        return False, 0, 0, b"", 0, stats
    return True, int(s0), int(s1), _x_bytes(x0, x1, b), comps, stats


def bip_construct(hi, lo, int n, int b, long long max_seeds):
    found, s0, s1, x, _, stats = _bip_search_native(hi, lo, n, b, max_seeds,
                                                    True, False)
    return found, s0, s1, x, stats


def bip_shockhash(hi, lo, int n, long long max_seeds):
    found, s0, s1, _, _, stats = _bip_search_native(hi, lo, n, 0, max_seeds,
                                                    False, False)
    return found, s0, s1, stats


def bip_first_pseudoforest(hi, lo, int n, long long max_seeds):
    found, _, _, _, comps, stats = _bip_search_native(hi, lo, n, 0, max_seeds,
                                                      False, True)
    return found, comps, stats
