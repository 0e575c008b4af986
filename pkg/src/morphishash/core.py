"""Base-case construction and query: seed search with a pseudoforest filter
followed by a linear solve that folds the orientation into a compressed
retrieval vector.

A constructed instance stores the successful seed(s) and a b-bit solution
vector x. A key's position is its `which = row(key)·x` candidate, so the
whole orientation rides on b stored bits instead of one bit per key.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import _kernel, bitio
from .gf2 import BitVector
from .hashing import (BIPARTITE, MAX_BASE_N, PLAIN, KeyHash, candidate,
                      pair_seed, retrieval_row)


@dataclass(frozen=True)
class BaseCaseConfig:
    n: int
    b: int
    variant: str = PLAIN
    max_seeds: int = 1 << 24

    def __post_init__(self):
        if self.variant not in (PLAIN, BIPARTITE):
            raise ValueError(f"unknown variant {self.variant!r}")
        if not 1 <= self.n <= MAX_BASE_N:
            raise ValueError(f"n must be in [1, {MAX_BASE_N}]")
        if not 0 <= self.b <= self.n:
            raise ValueError("b must be in [0, n]")
        if self.variant == BIPARTITE and self.n % 2:
            raise ValueError("bipartite variant requires even n")
        if self.max_seeds < 1:
            raise ValueError("max_seeds must be positive")


@dataclass
class SearchStats:
    """Counters of one seed search, for space accounting and benchmarks.

    For the bipartite search both halves scan the same raw seed counter, so
    `seeds_consumed` is simultaneously each side's consumed count; the
    examined unordered seed-pair universe c(c+1)/2 (filter-skipped pairs
    included) is what the idealized space charge uses, while `pairs_tested`
    counts executed pseudoforest tests.
    """

    variant: str
    seeds_consumed: int = 0
    admitted: tuple[int, int] = (0, 0)
    pairs_tested: int = 0
    pseudoforests_found: int = 0
    systems_solved: int = 0
    systems_unsolvable: int = 0

    @property
    def successful_seed(self) -> int:
        """Per-side consumed seed count at success (1-based)."""
        return self.seeds_consumed

    @property
    def pairs_examined(self) -> int:
        """Unordered raw seed pairs examined by the expanding enumeration."""
        c = self.seeds_consumed
        return c * (c + 1) // 2 if self.variant == BIPARTITE else c

    def check(self) -> None:
        assert self.pseudoforests_found == (
            self.systems_solved + self.systems_unsolvable)


class ConstructionFailure(RuntimeError):
    """Seed budget exhausted; carries the search counters."""

    def __init__(self, message: str, stats: SearchStats):
        super().__init__(message)
        self.stats = stats


@dataclass
class BaseCaseMphf:
    variant: str
    n: int
    b: int
    seeds: tuple[int, ...]  # (s,) for plain, (s0, s1) for bipartite
    x: BitVector

    def __post_init__(self):
        if len(self.x) != self.b:
            raise ValueError("x must hold exactly b bits")

    @property
    def retrieval_seed(self) -> int:
        if self.variant == PLAIN:
            return self.seeds[0]
        return pair_seed(self.seeds[0], self.seeds[1])

    def query(self, kh: KeyHash) -> int:
        """Position in [0, n); foreign keys get an arbitrary valid position."""
        which = retrieval_row(kh, self.retrieval_seed, self.b).dot(self.x)
        seed = self.seeds[which] if self.variant == BIPARTITE else self.seeds[0]
        return candidate(kh, seed, which, self.n, self.variant)

    def query_all(self, key_hashes: Sequence[KeyHash]) -> list[int]:
        return [self.query(kh) for kh in key_hashes]

    def to_bytes(self) -> bytes:
        payload = bytearray()
        payload.append(0 if self.variant == PLAIN else 1)
        payload += bitio.encode_varint(self.n)
        payload += bitio.encode_varint(self.b)
        for s in self.seeds:
            payload += bitio.encode_varint(s)
        payload += self.x.to_bytes()
        return bitio.wrap_section(bitio.TAG_BASE_CASE, bytes(payload))

    @classmethod
    def from_payload(cls, payload: bytes) -> "BaseCaseMphf":
        if not payload:
            raise bitio.FormatError("empty base-case payload", 0)
        variant = PLAIN if payload[0] == 0 else BIPARTITE
        if payload[0] > 1:
            raise bitio.FormatError(f"unknown variant byte {payload[0]}", 0)
        off = 1
        n, off = bitio.decode_varint(payload, off)
        b, off = bitio.decode_varint(payload, off)
        if not 1 <= n <= MAX_BASE_N or not 0 <= b <= n:
            raise bitio.FormatError("implausible n/b", off)
        nseeds = 1 if variant == PLAIN else 2
        seeds = []
        for _ in range(nseeds):
            s, off = bitio.decode_varint(payload, off)
            seeds.append(s)
        nx = (b + 7) // 8
        if len(payload) - off != nx:
            raise bitio.FormatError(
                f"x payload is {len(payload) - off} bytes, expected {nx}", off)
        x = BitVector.from_bytes(payload[off:off + nx], b)
        return cls(variant, n, b, tuple(seeds), x)

    @classmethod
    def from_bytes(cls, data: bytes) -> "BaseCaseMphf":
        tag, payload = bitio.unwrap_section(data)
        if tag != bitio.TAG_BASE_CASE:
            raise bitio.FormatError(f"expected base-case section, got tag {tag}", 6)
        return cls.from_payload(payload)


def _split_words(key_hashes: Sequence[KeyHash]) -> tuple[list[int], list[int]]:
    if len(set(key_hashes)) != len(key_hashes):
        raise ValueError("duplicate key")
    return [kh.hi for kh in key_hashes], [kh.lo for kh in key_hashes]


def _stats_from_kernel(variant: str, raw7) -> SearchStats:
    raw, adm0, adm1, pairs, pf, solved, unsolvable = raw7
    return SearchStats(variant, int(raw), (int(adm0), int(adm1)), int(pairs),
                       int(pf), int(solved), int(unsolvable))


def construct_base(key_hashes: Sequence[KeyHash], cfg: BaseCaseConfig
                   ) -> tuple[BaseCaseMphf, SearchStats]:
    """Search seeds until the folded system solves; verify bijectivity."""
    if len(key_hashes) != cfg.n:
        raise ValueError(f"{len(key_hashes)} keys for n={cfg.n}")
    hi, lo = _split_words(key_hashes)
    if cfg.variant == PLAIN:
        found, seed, x_bytes, kstats = _kernel.plain_construct(
            hi, lo, cfg.n, cfg.b, cfg.max_seeds)
        seeds = (seed,)
    else:
        found, s0, s1, x_bytes, kstats = _kernel.bip_construct(
            hi, lo, cfg.n, cfg.b, cfg.max_seeds)
        seeds = (s0, s1)
    stats = _stats_from_kernel(cfg.variant, kstats)
    stats.check()
    if not found:
        raise ConstructionFailure(
            f"no solvable seed within {cfg.max_seeds} ({cfg.variant}, "
            f"n={cfg.n}, b={cfg.b})", stats)
    mphf = BaseCaseMphf(cfg.variant, cfg.n, cfg.b, seeds,
                        BitVector.from_bytes(x_bytes, cfg.b))
    positions = mphf.query_all(key_hashes)
    if sorted(positions) != list(range(cfg.n)):
        raise AssertionError("constructed instance is not a bijection")
    return mphf, stats


def query_base(m: BaseCaseMphf, kh: KeyHash) -> int:
    return m.query(kh)


def shockhash_stats_base(key_hashes: Sequence[KeyHash], cfg: BaseCaseConfig
                         ) -> SearchStats:
    """Baseline: identical enumeration, accept the first pseudoforest.

    Stats only; the accepted instance is charged n retrieval bits in the
    space accounting and is not query-capable here.
    """
    if len(key_hashes) != cfg.n:
        raise ValueError(f"{len(key_hashes)} keys for n={cfg.n}")
    hi, lo = _split_words(key_hashes)
    if cfg.variant == PLAIN:
        found, _seed, kstats = _kernel.plain_shockhash(hi, lo, cfg.n, cfg.max_seeds)
    else:
        found, _s0, _s1, kstats = _kernel.bip_shockhash(hi, lo, cfg.n, cfg.max_seeds)
    stats = _stats_from_kernel(cfg.variant, kstats)
    stats.check()
    if not found:
        raise ConstructionFailure(
            f"no pseudoforest within {cfg.max_seeds} ({cfg.variant}, n={cfg.n})",
            stats)
    return stats


def sample_components(key_hashes: Sequence[KeyHash], n: int,
                      max_seeds: int = 1 << 24) -> tuple[int, SearchStats]:
    """Component count of the first accepted bipartite pseudoforest."""
    hi, lo = _split_words(key_hashes)
    found, comps, kstats = _kernel.bip_first_pseudoforest(hi, lo, n, max_seeds)
    stats = _stats_from_kernel(BIPARTITE, kstats)
    if not found:
        raise ConstructionFailure("no pseudoforest found", stats)
    return int(comps), stats
