"""Bit-exact parity between the compiled and pure kernels on every entry
point, including all counters."""

import numpy as np
import pytest

from morphishash._kernel import BACKEND, get_backend


def _both_backends():
    pure = get_backend("pure")
    try:
        native = get_backend("native")
    except ImportError:
        pytest.skip("compiled backend not built")
    return native, pure


def _key_arrays(seed, trials, n):
    rng = np.random.default_rng(seed)
    hi = rng.integers(0, 2 ** 64, (trials, n), dtype=np.uint64)
    lo = rng.integers(0, 2 ** 64, (trials, n), dtype=np.uint64)
    return hi, lo


def test_backend_name_exposed():
    assert BACKEND in ("native", "pure")


@pytest.mark.parametrize("n,b", [(1, 0), (2, 1), (7, 5), (16, 14), (33, 30),
                                 (64, 60)])
def test_plain_parity(n, b):
    native, pure = _both_backends()
    hi, lo = _key_arrays(100 + n, 8, n)
    for t in range(8):
        a = native.plain_construct(hi[t], lo[t], n, b, 1 << 22)
        p = pure.plain_construct(hi[t], lo[t], n, b, 1 << 22)
        assert a == p
        a = native.plain_shockhash(hi[t], lo[t], n, 1 << 22)
        p = pure.plain_shockhash(hi[t], lo[t], n, 1 << 22)
        assert a == p


@pytest.mark.parametrize("n,b", [(2, 1), (4, 2), (10, 7), (20, 17), (34, 30)])
def test_bipartite_parity(n, b):
    native, pure = _both_backends()
    hi, lo = _key_arrays(200 + n, 6, n)
    for t in range(6):
        a = native.bip_construct(hi[t], lo[t], n, b, 1 << 22)
        p = pure.bip_construct(hi[t], lo[t], n, b, 1 << 22)
        assert a == p
        a = native.bip_shockhash(hi[t], lo[t], n, 1 << 22)
        p = pure.bip_shockhash(hi[t], lo[t], n, 1 << 22)
        assert a == p
        a = native.bip_first_pseudoforest(hi[t], lo[t], n, 1 << 22)
        p = pure.bip_first_pseudoforest(hi[t], lo[t], n, 1 << 22)
        assert a == p


def test_failure_paths_identical():
    native, pure = _both_backends()
    hi, lo = _key_arrays(300, 1, 2)
    # bipartite n=2 with b=0 never solves: compare exhausted-state stats
    a = native.bip_construct(hi[0], lo[0], 2, 0, 40)
    p = pure.bip_construct(hi[0], lo[0], 2, 0, 40)
    assert a == p
    assert a[0] is False or a[0] == 0  # not found


def test_big_b_two_word_solutions():
    """b > 64 exercises the second solution word in both backends."""
    native, pure = _both_backends()
    n, b = 80, 76
    hi, lo = _key_arrays(400, 3, n)
    for t in range(3):
        a = native.plain_construct(hi[t], lo[t], n, b, 1 << 24)
        p = pure.plain_construct(hi[t], lo[t], n, b, 1 << 24)
        assert a == p
        assert a[0] and len(a[2]) == (b + 7) // 8


def test_kernel_argument_validation():
    native, pure = _both_backends()
    hi, lo = _key_arrays(500, 1, 4)
    for backend in (native, pure):
        if backend.BACKEND_NAME == "pure":
            continue  # the pure kernel trusts its callers
        with pytest.raises(ValueError):
            backend.plain_construct(hi[0], lo[0], 4, 5, 10)
        with pytest.raises(ValueError):
            backend.bip_construct(hi[0], lo[0], 3, 1, 10)


def test_backend_benchmark_reports_identical_results():
    from morphishash.bench import bench_backends
    report = bench_backends(n=16, b=13, trials=6, master_seed=5)
    if report.get("native") and report.get("pure"):
        assert report["identical"]
