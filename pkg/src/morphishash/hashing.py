"""Deterministic seedable hashing: master digest and derived value streams.

The serialized-format contract fixes every step bit-exactly:

* master hash: ``blake2b(key, digest_size=16)``; ``lo`` is bytes 0..7 and
  ``hi`` bytes 8..15, little-endian.
* ``mix64``: the splitmix64 finalizer
  (``z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27; z *= 0x94D049BB133111EB;
  z ^= z>>31``), all mod 2^64.
* stream tweak: ``tweak(seed, stream, counter) =
  mix64(seed + stream + counter * 0x9E3779B97F4A7C15)``.
* derived value: ``derive(kh, tw) = mix64(mix64(kh.lo ^ tw) ^ kh.hi)``.
* range reduction to [0, n): ``((value >> 32) * n) >> 32`` — branch-free,
  identical on every platform, valid for n < 2^32.
* bipartite pair seed: ``mix64(mix64(s0 + STREAM_PAIR) + s1 * GOLDEN)``.

Stream constants are distinct 64-bit values (hex digits of pi), giving the
candidate, retrieval, bucket and threshold streams pairwise-independent
derivations from one master digest.
"""

from __future__ import annotations

import hashlib
from typing import NamedTuple

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

STREAM_CAND0 = 0x243F6A8885A308D3
STREAM_CAND1 = 0x13198A2E03707344
STREAM_RETRIEVAL = 0xA4093822299F31D0
STREAM_BUCKET = 0x082EFA98EC4E6C89
STREAM_THRESHOLD = 0x452821E638D01377
STREAM_PAIR = 0xBE5466CF34E90C6C
STREAM_GFP_ROW = 0xC0AC29B7C97C50DD

PLAIN = "plain"
BIPARTITE = "bipartite"

MAX_BASE_N = 128  # hot-kernel cap: solution vectors stay within two words


class KeyHash(NamedTuple):
    """128-bit master digest; everything downstream derives from it alone."""

    hi: int
    lo: int


def master_hash(key: bytes) -> KeyHash:
    digest = hashlib.blake2b(key, digest_size=16).digest()
    return KeyHash(int.from_bytes(digest[8:16], "little"),
                   int.from_bytes(digest[0:8], "little"))


def vertex_hash(v: int) -> KeyHash:
    """Integer-identified vertices hash through their 8-byte encoding."""
    return master_hash(v.to_bytes(8, "little"))


def mix64(z: int) -> int:
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


def tweak(seed: int, stream: int, counter: int = 0) -> int:
    return mix64((seed + stream + counter * GOLDEN) & M64)


def derive(kh: KeyHash, tw: int) -> int:
    return mix64(mix64(kh.lo ^ tw) ^ kh.hi)


def reduce_range(value: int, n: int) -> int:
    """Map a 64-bit value to [0, n) by fixed-point multiply on the high bits."""
    return ((value >> 32) * n) >> 32


def pair_seed(s0: int, s1: int) -> int:
    """Retrieval-stream seed for a bipartite seed pair; fresh per tested pair."""
    return mix64((mix64((s0 + STREAM_PAIR) & M64) + s1 * GOLDEN) & M64)


def candidate(kh: KeyHash, seed: int, which: int, n: int, variant: str = PLAIN) -> int:
    """Candidate position of a key under `seed`; 0-based in [0, n).

    plain: independent streams for which=0 and which=1, both uniform on [0, n).
    bipartite: which=0 uniform on [0, n/2) under the side-0 seed; which=1
    uniform on [n/2, n) under the side-1 seed. n must be even.
    """
    if which not in (0, 1):
        raise ValueError("which must be 0 or 1")
    stream = STREAM_CAND0 if which == 0 else STREAM_CAND1
    value = derive(kh, tweak(seed, stream))
    if variant == PLAIN:
        return reduce_range(value, n)
    if variant == BIPARTITE:
        if n % 2:
            raise ValueError("bipartite variant requires even n")
        half = n // 2
        pos = reduce_range(value, half)
        return pos if which == 0 else half + pos
    raise ValueError(f"unknown variant {variant!r}")


def retrieval_row(kh: KeyHash, seed: int, b: int):
    """b pseudo-random bits in counter mode; trailing bits of the last word zero."""
    from .gf2 import BitVector

    bits = 0
    for w in range((b + 63) // 64):
        bits |= derive(kh, tweak(seed, STREAM_RETRIEVAL, w)) << (64 * w)
    return BitVector(b, bits & ((1 << b) - 1))


def retrieval_row_gfp(kh: KeyHash, seed: int, b: int, p: int) -> tuple[int, ...]:
    """Retrieval row over F_p: counter-mode uniform draws in [0, p)."""
    return tuple(reduce_range(derive(kh, tweak(seed, STREAM_GFP_ROW, t)), p)
                 for t in range(b))


def bucket_assign(kh: KeyHash, num_buckets: int, layer: int = 0) -> int:
    if num_buckets < 1:
        raise ValueError("need at least one bucket")
    return reduce_range(derive(kh, tweak(0, STREAM_BUCKET, layer)), num_buckets)


def threshold_value(kh: KeyHash, layer: int = 0) -> int:
    """Uniform 16-bit value on a dedicated stream, for bumping comparisons."""
    return derive(kh, tweak(0, STREAM_THRESHOLD, layer)) >> 48
