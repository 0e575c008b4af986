"""Pure-Python search kernels; the reference the compiled backend must match.

Every entry point mirrors a function in the compiled extension and must
produce bit-identical results and counters. Stats tuples are
``(raw_consumed, adm0, adm1, pairs_tested, pf_found, solved, unsolvable)``:
raw seeds scanned (per side; for the bipartite search both sides scan every
raw value), admitted-list sizes, executed pseudoforest tests, pseudoforests
found, and linear-system outcomes.

Bipartite pair enumeration: each raw seed contributes one side-0 and one
side-1 layout; the side-1 layout is admitted (filter) before the side-0
layout is processed, and an admitted side-0 layout is tested against every
admitted side-1 seed j <= c in admission order. Each unordered raw pair is
therefore examined exactly once, which is the convention the published
seed-count curves follow.
"""

from __future__ import annotations

from .gf2 import solve_bits
from .hashing import (GOLDEN, M64, STREAM_CAND0, STREAM_CAND1, STREAM_RETRIEVAL,
                      mix64, pair_seed)

BACKEND_NAME = "pure"


def _tweak(seed: int, stream: int, counter: int = 0) -> int:
    return mix64((seed + stream + counter * GOLDEN) & M64)


def _derive(hi: int, lo: int, tw: int) -> int:
    return mix64(mix64(lo ^ tw) ^ hi)


def _pos(value: int, n: int) -> int:
    return ((value >> 32) * n) >> 32


def _as_int_lists(hi, lo):
    return [int(x) for x in hi], [int(x) for x in lo]


def _row_bits(hi: int, lo: int, seed: int, b: int) -> int:
    bits = 0
    for w in range((b + 63) // 64):
        bits |= _derive(hi, lo, _tweak(seed, STREAM_RETRIEVAL, w)) << (64 * w)
    return bits & ((1 << b) - 1)


def _solve_system(us, vs, rows, n, b):
    """Fold incidence x retrieval-rows and solve against the parity vector."""
    ah = [0] * n
    d = (1 << n) - 1
    for j in range(n):
        a, c = us[j], vs[j]
        if a != c:
            ah[a] ^= rows[j]
            ah[c] ^= rows[j]
        d ^= 1 << a
    return solve_bits(ah, b, d)


def plain_construct(hi, lo, n: int, b: int, max_seeds: int, start_seed: int = 0):
    """Returns (found, seed, x_bytes, stats)."""
    his, los = _as_int_lists(hi, lo)
    uf_parent = [0] * n
    uf_nodes = [0] * n
    uf_edges = [0] * n
    raw = pf = solved = unsolvable = 0
    for seed in range(start_seed, start_seed + max_seeds):
        raw += 1
        tw0 = _tweak(seed, STREAM_CAND0)
        tw1 = _tweak(seed, STREAM_CAND1)
        for i in range(n):
            uf_parent[i] = i
            uf_nodes[i] = 1
            uf_edges[i] = 0
        us = []
        vs = []
        ok = True
        for j in range(n):
            a = _pos(_derive(his[j], los[j], tw0), n)
            c = _pos(_derive(his[j], los[j], tw1), n)
            us.append(a)
            vs.append(c)
            ra = a
            while uf_parent[ra] != ra:
                uf_parent[ra] = uf_parent[uf_parent[ra]]
                ra = uf_parent[ra]
            rc = c
            while uf_parent[rc] != rc:
                uf_parent[rc] = uf_parent[uf_parent[rc]]
                rc = uf_parent[rc]
            if ra == rc:
                uf_edges[ra] += 1
                if uf_edges[ra] > uf_nodes[ra]:
                    ok = False
                    break
            else:
                if uf_nodes[ra] < uf_nodes[rc]:
                    ra, rc = rc, ra
                uf_parent[rc] = ra
                uf_nodes[ra] += uf_nodes[rc]
                uf_edges[ra] += uf_edges[rc] + 1
                if uf_edges[ra] > uf_nodes[ra]:
                    ok = False
                    break
        if not ok:
            continue
        pf += 1
        rows = [_row_bits(his[j], los[j], seed, b) for j in range(n)]
        x = _solve_system(us, vs, rows, n, b)
        if x is None:
            unsolvable += 1
            continue
        solved += 1
        stats = (raw, 0, 0, 0, pf, solved, unsolvable)
        return True, seed, x.to_bytes((b + 7) // 8, "little"), stats
    return False, 0, b"", (raw, 0, 0, 0, pf, solved, unsolvable)


def plain_shockhash(hi, lo, n: int, max_seeds: int, start_seed: int = 0):
    """Accept the first pseudoforest; no solve. Returns (found, seed, stats)."""
    his, los = _as_int_lists(hi, lo)
    raw = 0
    for seed in range(start_seed, start_seed + max_seeds):
        raw += 1
        tw0 = _tweak(seed, STREAM_CAND0)
        tw1 = _tweak(seed, STREAM_CAND1)
        parent = list(range(n))
        nodes = [1] * n
        edges = [0] * n
        ok = True
        for j in range(n):
            a = _pos(_derive(his[j], los[j], tw0), n)
            c = _pos(_derive(his[j], los[j], tw1), n)
            ra = a
            while parent[ra] != ra:
                parent[ra] = parent[parent[ra]]
                ra = parent[ra]
            rc = c
            while parent[rc] != rc:
                parent[rc] = parent[parent[rc]]
                rc = parent[rc]
            if ra == rc:
                edges[ra] += 1
                if edges[ra] > nodes[ra]:
                    ok = False
                    break
            else:
                if nodes[ra] < nodes[rc]:
                    ra, rc = rc, ra
                parent[rc] = ra
                nodes[ra] += nodes[rc]
                edges[ra] += edges[rc] + 1
                if edges[ra] > nodes[ra]:
                    ok = False
                    break
        if ok:
            return True, seed, (raw, 0, 0, 0, 1, 1, 0)
    return False, 0, (raw, 0, 0, 0, 0, 0, 0)


def _bip_layout(his, los, seed: int, stream: int, n: int, half: int, offset: int):
    """Layout for one side plus its surjectivity flag."""
    tw = _tweak(seed, stream)
    out = []
    mask = 0
    for j in range(n):
        p = _pos(_derive(his[j], los[j], tw), half)
        out.append(offset + p)
        mask |= 1 << p
    return out, mask == (1 << half) - 1


def _bip_pf(l0, l1, n: int) -> bool:
    parent = list(range(n))
    nodes = [1] * n
    edges = [0] * n
    for a, c in zip(l0, l1):
        ra = a
        while parent[ra] != ra:
            parent[ra] = parent[parent[ra]]
            ra = parent[ra]
        rc = c
        while parent[rc] != rc:
            parent[rc] = parent[parent[rc]]
            rc = parent[rc]
        if ra == rc:
            edges[ra] += 1
            if edges[ra] > nodes[ra]:
                return False
        else:
            if nodes[ra] < nodes[rc]:
                ra, rc = rc, ra
            parent[rc] = ra
            nodes[ra] += nodes[rc]
            edges[ra] += edges[rc] + 1
            if edges[ra] > nodes[ra]:
                return False
    return True


def _bip_search(hi, lo, n, b, max_seeds, solve: bool, want_components: bool):
    his, los = _as_int_lists(hi, lo)
    half = n // 2
    admitted1: list[tuple[int, list[int]]] = []
    adm0 = 0
    pairs = pf = solved = unsolvable = 0
    for c in range(max_seeds):
        l1, ok1 = _bip_layout(his, los, c, STREAM_CAND1, n, half, half)
        if ok1:
            admitted1.append((c, l1))
        l0, ok0 = _bip_layout(his, los, c, STREAM_CAND0, n, half, 0)
        if not ok0:
            continue
        adm0 += 1
        for j, lj in admitted1:
            pairs += 1
            if not _bip_pf(l0, lj, n):
                continue
            pf += 1
            if not solve:
                comps = _components(l0, lj, n) if want_components else 0
                stats = (c + 1, adm0, len(admitted1), pairs, pf, 1, 0)
                return True, c, j, b"", comps, stats
            ps = pair_seed(c, j)
            rows = [_row_bits(his[t], los[t], ps, b) for t in range(n)]
            x = _solve_system(l0, lj, rows, n, b)
            if x is None:
                unsolvable += 1
                continue
            solved += 1
            stats = (c + 1, adm0, len(admitted1), pairs, pf, solved, unsolvable)
            return True, c, j, x.to_bytes((b + 7) // 8, "little"), 0, stats
    stats = (max_seeds, adm0, len(admitted1), pairs, pf, solved, unsolvable)
    return False, 0, 0, b"", 0, stats


def _components(l0, l1, n: int) -> int:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, c in zip(l0, l1):
        ra, rc = find(a), find(c)
        if ra != rc:
            parent[rc] = ra
    return sum(1 for i in range(n) if find(i) == i)


def bip_construct(hi, lo, n: int, b: int, max_seeds: int):
    """Returns (found, s0, s1, x_bytes, stats)."""
    found, s0, s1, x, _, stats = _bip_search(hi, lo, n, b, max_seeds, True, False)
    return found, s0, s1, x, stats


def bip_shockhash(hi, lo, n: int, max_seeds: int):
    """First pseudoforest pair, no solve. Returns (found, s0, s1, stats)."""
    found, s0, s1, _, _, stats = _bip_search(hi, lo, n, 0, max_seeds, False, False)
    return found, s0, s1, stats


def bip_first_pseudoforest(hi, lo, n: int, max_seeds: int):
    """Component count of the first accepted pseudoforest. (found, comps, stats)."""
    found, _, _, _, comps, stats = _bip_search(hi, lo, n, 0, max_seeds, False, True)
    return found, comps, stats


