import itertools
import random

import pytest

from morphishash.gfp import (PrimeField, PrimeFieldVector, gfp_matvec,
                             gfp_solve, is_prime)


def brute_force(rows, d, p, k):
    for cand in itertools.product(range(p), repeat=k):
        if all(sum(r[j] * cand[j] for j in range(k)) % p == d[i]
               for i, r in enumerate(rows)):
            return cand
    return None


def test_identity_p7():
    rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    x = gfp_solve(rows, [2, 5, 0], 7)
    assert x == PrimeFieldVector(7, [2, 5, 0])


def test_free_variable_zeroed():
    # (1 4 | 3) over F_5: pivot solves x0=3, free x1=0
    x = gfp_solve([[1, 4]], [3], 5)
    assert x == PrimeFieldVector(5, [3, 0])
    assert (1 * 3 + 4 * 0) % 5 == 3


def test_random_6x4_p11_against_brute_force():
    rng = random.Random(11)
    for _ in range(40):
        rows = [[rng.randrange(11) for _ in range(4)] for _ in range(6)]
        d = [rng.randrange(11) for _ in range(6)]
        got = gfp_solve(rows, d, 11)
        oracle = brute_force(rows, d, 11, 4)
        if oracle is None:
            assert got is None
        else:
            assert got is not None
            assert list(gfp_matvec(rows, got)) == d


def test_solution_satisfies_system_small_primes():
    rng = random.Random(3)
    for p in (2, 3, 5, 7, 13):
        for _ in range(30):
            m, k = rng.randint(1, 8), rng.randint(1, 6)
            rows = [[rng.randrange(p) for _ in range(k)] for _ in range(m)]
            d = [rng.randrange(p) for _ in range(m)]
            x = gfp_solve(rows, d, p)
            if x is not None:
                assert list(gfp_matvec(rows, x)) == d


def test_nonprime_rejected():
    with pytest.raises(ValueError):
        PrimeField(9)
    with pytest.raises(ValueError):
        gfp_solve([[1]], [0], 10)
    with pytest.raises(ValueError):
        PrimeFieldVector(6, [1])


def test_is_prime_small_and_large():
    primes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}
    for n in range(2, 43):
        assert is_prime(n) == (n in primes)
    assert is_prime((1 << 61) - 1)  # Mersenne prime
    assert not is_prime((1 << 61) - 3)
    assert not is_prime(1)
    assert not is_prime(0)


def test_entries_validated():
    with pytest.raises(ValueError):
        PrimeFieldVector(7, [7])
