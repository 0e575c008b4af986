import math
import random
from fractions import Fraction

import numpy as np
import pytest

from morphishash import _npmix
from morphishash.gf2 import BitMatrix, BitVector, gf2_defect, gf2_solve
from morphishash.graph import (DuplicateKeyError, HashedGraph, accumulate_ah,
                               build_graph, compute_d, count_components,
                               incidence_matrix, is_pseudoforest,
                               orient_pseudoforest, surjectivity_filter)
from morphishash.hashing import (BIPARTITE, PLAIN, KeyHash, candidate,
                                 retrieval_row)


def rand_keyset(rng, n):
    return [KeyHash(rng.getrandbits(64), rng.getrandbits(64)) for _ in range(n)]


def orientable_brute_force(g: HashedGraph) -> bool:
    """Oracle: some orientation gives every node indegree exactly 1."""
    n = g.n
    for bits in range(1 << n):
        seen = 0
        ok = True
        for j in range(n):
            t = g.v[j] if (bits >> j) & 1 else g.u[j]
            m = 1 << t
            if seen & m:
                ok = False
                break
            seen |= m
        if ok and seen == (1 << n) - 1:
            return True
    return False


def dfs_components(g: HashedGraph) -> int:
    adj = [[] for _ in range(g.n)]
    for a, b in zip(g.u, g.v):
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * g.n
    comps = 0
    for s in range(g.n):
        if seen[s]:
            continue
        comps += 1
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
    return comps


def test_build_graph_trivial_shapes():
    rng = random.Random(0)
    g = build_graph(rand_keyset(rng, 1), 7, 1, PLAIN)
    assert g.u == [0] and g.v == [0]  # single slot: a loop
    g2 = build_graph(rand_keyset(rng, 2), (3, 4), 2, BIPARTITE)
    assert g2.u == [0, 0] and g2.v == [1, 1]


def test_build_graph_matches_candidate_recomputation():
    rng = random.Random(1)
    for _ in range(1000):
        n = rng.randint(1, 24)
        variant = PLAIN if rng.random() < 0.5 or n % 2 else BIPARTITE
        keys = rand_keyset(rng, n)
        seed = (rng.getrandbits(32), rng.getrandbits(32)) \
            if variant == BIPARTITE else rng.getrandbits(32)
        g = build_graph(keys, seed, n, variant)
        s0, s1 = seed if variant == BIPARTITE else (seed, seed)
        for j, kh in enumerate(keys):
            assert g.u[j] == candidate(kh, s0, 0, n, variant)
            assert g.v[j] == candidate(kh, s1, 1, n, variant)


def test_build_graph_rejects_duplicates():
    rng = random.Random(2)
    keys = rand_keyset(rng, 3)
    with pytest.raises(DuplicateKeyError):
        build_graph(keys + [keys[0]], 1, 4, PLAIN)


def test_pseudoforest_trivial_cases():
    assert is_pseudoforest(HashedGraph(1, [0], [0]))  # loop = 1-cycle
    # triple edge: component with 2 nodes, 3 edges
    assert not is_pseudoforest(HashedGraph(3, [0, 0, 0], [1, 1, 1]))
    # two loops + double edge
    assert is_pseudoforest(HashedGraph(4, [0, 1, 2, 2], [0, 1, 3, 3]))


def test_pseudoforest_against_orientation_oracle():
    rng = random.Random(3)
    for _ in range(3000):
        n = rng.randint(1, 8)
        g = HashedGraph(n, [rng.randrange(n) for _ in range(n)],
                        [rng.randrange(n) for _ in range(n)])
        assert is_pseudoforest(g) == orientable_brute_force(g)


def test_components_trivial_and_reference():
    assert count_components(HashedGraph(2, [0, 0], [1, 1])) == 1
    assert count_components(HashedGraph(4, [0, 1, 2, 3], [0, 1, 2, 3])) == 4
    rng = random.Random(4)
    for _ in range(1000):
        n = rng.randint(1, 64)
        g = HashedGraph(n, [rng.randrange(n) for _ in range(n)],
                        [rng.randrange(n) for _ in range(n)])
        assert count_components(g) == dfs_components(g)


def test_compute_d_definition():
    # node 2 hit by exactly one 0-candidate: d_2 = (1+1) mod 2 = 0
    g = HashedGraph(4, [2, 0, 0, 1], [3, 1, 2, 3])
    d = compute_d(g)
    for i in range(4):
        cnt = sum(1 for a in g.u if a == i)
        assert d.get(i) == (cnt + 1) % 2
    assert d.get(2) == 0
    # single loop: d_0 = (1+1) mod 2 = 0
    assert compute_d(HashedGraph(1, [0], [0])).bits == 0


def test_orientation_satisfies_system():
    rng = random.Random(5)
    found = 0
    while found < 1000:
        n = rng.randint(1, 16)
        g = HashedGraph(n, [rng.randrange(n) for _ in range(n)],
                        [rng.randrange(n) for _ in range(n)])
        if not is_pseudoforest(g):
            continue
        found += 1
        y = orient_pseudoforest(g)
        targets = sorted((g.v[j] if y.get(j) else g.u[j]) for j in range(n))
        assert targets == list(range(n))
        a = incidence_matrix(g)
        assert a.matvec(y) == compute_d(g)


def test_orientation_trivial_cases():
    assert orient_pseudoforest(HashedGraph(1, [0], [0])).bits == 0  # loop -> 0
    y = orient_pseudoforest(HashedGraph(2, [0, 0], [1, 1]))
    g = HashedGraph(2, [0, 0], [1, 1])
    targets = sorted((g.v[j] if y.get(j) else g.u[j]) for j in range(2))
    assert targets == [0, 1]
    with pytest.raises(ValueError):
        orient_pseudoforest(HashedGraph(3, [0, 0, 0], [1, 1, 1]))


def test_solvability_iff_pseudoforest():
    rng = random.Random(6)
    for _ in range(2000):
        n = rng.randint(1, 16)
        g = HashedGraph(n, [rng.randrange(n) for _ in range(n)],
                        [rng.randrange(n) for _ in range(n)])
        a = incidence_matrix(g)
        solvable = gf2_solve(a, compute_d(g)) is not None
        assert solvable == is_pseudoforest(g)


def test_defect_at_least_components():
    rng = random.Random(7)
    found = 0
    while found < 500:
        n = rng.randint(2, 16)
        g = HashedGraph(n, [rng.randrange(n) for _ in range(n)],
                        [rng.randrange(n) for _ in range(n)])
        if not is_pseudoforest(g):
            continue
        found += 1
        assert gf2_defect(incidence_matrix(g)) >= count_components(g)


def test_accumulate_ah_matches_naive_product():
    rng = random.Random(8)
    for _ in range(500):
        n = rng.randint(1, 32)
        b = rng.randint(0, 32)
        g = HashedGraph(n, [rng.randrange(n) for _ in range(n)],
                        [rng.randrange(n) for _ in range(n)])
        rows = [BitVector(b, rng.getrandbits(b)) for _ in range(n)]
        folded = accumulate_ah(g, rows)
        naive = incidence_matrix(g).matmul(BitMatrix.from_rows(rows)
                                           if rows else BitMatrix(0, b))
        assert folded == naive


def test_accumulate_ah_loops_and_empty():
    g = HashedGraph(3, [0, 1, 2], [0, 1, 2])  # all loops
    rows = [BitVector(5, 0b10101)] * 3
    assert accumulate_ah(g, rows) == BitMatrix.zeros(3, 5)
    g2 = HashedGraph(2, [0, 1], [1, 0])
    empty = accumulate_ah(g2, [BitVector(0), BitVector(0)])
    assert empty.cols == 0 and empty.rows == 2


def test_surjectivity_trivial():
    rng = random.Random(9)
    keys = rand_keyset(rng, 6)
    assert surjectivity_filter(keys, 0, 0, 1)
    assert surjectivity_filter(keys, 0, 1, 1)
    # 6 keys cannot cover 7 positions
    assert not surjectivity_filter(keys, 0, 0, 7)


def exact_surjection_probability(balls: int, bins: int) -> Fraction:
    total = Fraction(0)
    for k in range(bins + 1):
        total += (-1) ** k * math.comb(bins, k) * Fraction(bins - k, bins) ** balls
    return total


def test_surjectivity_rate_matches_inclusion_exclusion():
    exact = float(exact_surjection_probability(20, 10))
    rng = np.random.default_rng(77)
    n, half, seeds_n = 20, 10, 100_000
    hi = rng.integers(0, 2 ** 64, n, dtype=np.uint64)
    lo = rng.integers(0, 2 ** 64, n, dtype=np.uint64)
    from morphishash.hashing import STREAM_CAND0, tweak
    seeds = np.arange(seeds_n, dtype=np.uint64)
    tws = _npmix.mix64_arr(seeds + np.uint64(STREAM_CAND0))
    pos = _npmix.reduce_arr(
        _npmix.mix64_arr(_npmix.mix64_arr(lo[None, :] ^ tws[:, None]) ^ hi[None, :]),
        half)
    masks = np.zeros(seeds_n, dtype=np.uint64)
    for j in range(n):
        masks |= np.uint64(1) << pos[:, j]
    rate = float((masks == np.uint64((1 << half) - 1)).mean())
    assert abs(rate - exact) <= 0.05 * exact
    # spot-check the vectorized filter against the scalar one
    keys = [KeyHash(int(h), int(l)) for h, l in zip(hi, lo)]
    for s in range(50):
        expected = bool(masks[s] == np.uint64((1 << half) - 1))
        assert surjectivity_filter(keys, s, 0, half) == expected
