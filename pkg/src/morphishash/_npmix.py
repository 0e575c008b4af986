"""Vectorized (numpy uint64) twin of the hashing derivation chain.

Used on batch paths (bucket assignment, thresholds, partitioned queries)
where per-key Python calls would dominate; pinned bit-exactly against
hashing.py by the test suite. All arithmetic wraps mod 2^64.
"""

from __future__ import annotations

import numpy as np

from .hashing import (GOLDEN, STREAM_BUCKET, STREAM_CAND0, STREAM_CAND1,
                      STREAM_RETRIEVAL, STREAM_THRESHOLD, tweak)

_U = np.uint64
_C1 = _U(0xBF58476D1CE4E5B9)
_C2 = _U(0x94D049BB133111EB)


def mix64_arr(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> _U(30)
    z *= _C1
    z ^= z >> _U(27)
    z *= _C2
    z ^= z >> _U(31)
    return z


def derive_arr(hi: np.ndarray, lo: np.ndarray, tw) -> np.ndarray:
    if not isinstance(tw, np.ndarray):
        tw = _U(tw)
    return mix64_arr(mix64_arr(lo ^ tw) ^ hi)


def reduce_arr(values: np.ndarray, n) -> np.ndarray:
    """Range reduction; n may be a scalar or a per-element uint64 array."""
    n = n.astype(np.uint64) if isinstance(n, np.ndarray) else _U(n)
    return ((values >> _U(32)) * n) >> _U(32)


def bucket_assign_arr(hi, lo, num_buckets: int, layer: int) -> np.ndarray:
    return reduce_arr(derive_arr(hi, lo, tweak(0, STREAM_BUCKET, layer)),
                      num_buckets)


def threshold_value_arr(hi, lo, layer: int) -> np.ndarray:
    return derive_arr(hi, lo, tweak(0, STREAM_THRESHOLD, layer)) >> _U(48)


def candidate_side_arr(hi, lo, seeds: np.ndarray, which: int, n) -> np.ndarray:
    """Candidate stream under per-key seeds; n scalar or per-key array."""
    stream = STREAM_CAND0 if which == 0 else STREAM_CAND1
    tw = mix64_arr(seeds + _U(stream))
    return reduce_arr(derive_arr(hi, lo, tw), n)


def retrieval_word_arr(hi, lo, seeds: np.ndarray, w: int) -> np.ndarray:
    """Retrieval-row word w under a per-key seed array."""
    tw = mix64_arr(seeds + _U(STREAM_RETRIEVAL) + _U((w * GOLDEN) & ((1 << 64) - 1)))
    return derive_arr(hi, lo, tw)
