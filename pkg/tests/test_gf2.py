import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from morphishash.gf2 import (BitMatrix, BitVector, DimensionMismatch,
                             gf2_defect, gf2_rank, gf2_solve)


def random_matrix(rng, rows, cols):
    return BitMatrix(rows, cols, [rng.getrandbits(cols) for _ in range(rows)])


def brute_force_solve(m: BitMatrix, d: BitVector):
    """Oracle: enumerate all 2^cols candidates, return those solving m·x=d."""
    sols = []
    for bits in range(1 << m.cols):
        x = BitVector(m.cols, bits)
        if m.matvec(x) == d:
            sols.append(x)
    return sols


def naive_rank(m: BitMatrix) -> int:
    """Reference elimination on bit lists, O(rows * cols^2)."""
    rows = [[m.row(i).get(j) for j in range(m.cols)] for i in range(m.rows)]
    rank = 0
    for col in range(m.cols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col]:
                rows[i] = [a ^ b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def test_identity_solve():
    a = BitMatrix.identity(4)
    d = BitVector.from_bits([1, 0, 1, 1])
    assert gf2_solve(a, d) == d


def test_zero_row_inconsistent():
    a = BitMatrix(1, 1, [0])
    assert gf2_solve(a, BitVector(1, 1)) is None


def test_dimension_mismatch_is_not_no_solution():
    a = BitMatrix.identity(3)
    with pytest.raises(DimensionMismatch):
        gf2_solve(a, BitVector(4, 0))


def test_solve_against_brute_force_8x5():
    rng = random.Random(20240811)
    for _ in range(200):
        a = random_matrix(rng, 8, 5)
        d = BitVector(8, rng.getrandbits(8))
        got = gf2_solve(a, d)
        oracle = brute_force_solve(a, d)
        if oracle:
            assert got in oracle
            assert a.matvec(got) == d
        else:
            assert got is None


def test_solution_exactness_random_shapes():
    rng = random.Random(7)
    for _ in range(300):
        m, k = rng.randint(1, 20), rng.randint(0, 20)
        a = random_matrix(rng, m, k)
        d = BitVector(m, rng.getrandbits(m))
        x = gf2_solve(a, d)
        if x is not None:
            assert a.matvec(x) == d


def test_rank_trivial():
    assert gf2_rank(BitMatrix.zeros(3, 3)) == 0
    assert gf2_rank(BitMatrix.identity(5)) == 5


def test_four_cycle_incidence_rank():
    # 4 nodes in a cycle: edges (0,1), (1,2), (2,3), (3,0)
    a = BitMatrix.zeros(4, 4)
    for j, (u, v) in enumerate([(0, 1), (1, 2), (2, 3), (3, 0)]):
        a.set_bit(u, j)
        a.set_bit(v, j)
    assert gf2_rank(a) == 3
    assert gf2_defect(a) == 1


def test_rank_matches_naive_reference():
    rng = random.Random(99)
    for _ in range(60):
        m, k = rng.randint(1, 64), rng.randint(1, 64)
        a = random_matrix(rng, m, k)
        assert gf2_rank(a) == naive_rank(a)


def test_no_solution_iff_rank_grows():
    rng = random.Random(5)
    for _ in range(200):
        m, k = rng.randint(1, 12), rng.randint(0, 10)
        a = random_matrix(rng, m, k)
        d = BitVector(m, rng.getrandbits(m))
        aug = BitMatrix(m, k + 1, [a.row_bits(i) | (d.get(i) << k)
                                   for i in range(m)])
        solvable = gf2_solve(a, d) is not None
        assert solvable == (gf2_rank(a) == gf2_rank(aug))


@given(st.integers(0, 200), st.data())
@settings(max_examples=80, deadline=None)
def test_bitvector_bytes_roundtrip(n, data):
    bits = data.draw(st.integers(0, (1 << n) - 1)) if n else 0
    v = BitVector(n, bits)
    assert BitVector.from_bytes(v.to_bytes(), n) == v
    assert len(v.to_bytes()) == (n + 7) // 8
    words = v.to_words()
    assert all(w < 1 << 64 for w in words)
    recomposed = 0
    for i, w in enumerate(words):
        recomposed |= w << (64 * i)
    assert recomposed == bits


@given(st.integers(1, 120), st.data())
@settings(max_examples=80, deadline=None)
def test_dot_is_and_parity(n, data):
    a = BitVector(n, data.draw(st.integers(0, (1 << n) - 1)))
    b = BitVector(n, data.draw(st.integers(0, (1 << n) - 1)))
    expected = sum(x & y for x, y in zip(a, b)) & 1
    assert a.dot(b) == expected


def test_bitvector_rejects_overflow_bits():
    with pytest.raises(ValueError):
        BitVector(3, 0b1000)


def test_matmul_oracle_against_matvec():
    rng = random.Random(13)
    for _ in range(50):
        m, k, c = rng.randint(1, 10), rng.randint(1, 10), rng.randint(1, 10)
        a = random_matrix(rng, m, k)
        h = random_matrix(rng, k, c)
        prod = a.matmul(h)
        for bits in (0, (1 << c) - 1, rng.getrandbits(c)):
            x = BitVector(c, bits)
            assert prod.matvec(x) == a.matvec(h.matvec(x))
