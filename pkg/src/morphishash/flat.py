"""Bucketed layer for large key sets: hash keys to buckets, bump overflow by
16-bit thresholds, run one base case per bucket, compose a global bijection
through prefix offsets.

Bumped keys cascade to a fresh bucket layer rather than refilling underfull
buckets: a key's layer is decidable at query time from the stored thresholds
alone. Keys surviving all layers land in an explicit sorted fallback map.
Base cases use the plain (single-seed) variant: bucket sizes are odd half
the time, and one seed Golomb-Rice coded stays within a couple of bits of
the idealized log2(seeds) charge.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel, _npmix, bitio
from .core import ConstructionFailure, SearchStats
from .hashing import (MAX_BASE_N, PLAIN, KeyHash, bucket_assign, candidate,
                      retrieval_row, threshold_value)
from .gf2 import BitVector

KEEP_ALL = 0xFFFF


@dataclass(frozen=True)
class FlatConfig:
    base_n: int = 32
    b_delta: int = 2  # per-bucket retrieval bits: max(size - b_delta, 0)
    bucket_load: float = 1.1
    max_layers: int = 4
    max_seeds: int = 1 << 24

    def __post_init__(self):
        if not 2 <= self.base_n <= MAX_BASE_N:
            raise ValueError(f"base_n must be in [2, {MAX_BASE_N}]")
        if not 0 <= self.b_delta <= self.base_n:
            raise ValueError("b_delta must be in [0, base_n]")
        if not self.bucket_load > 0:
            raise ValueError("bucket_load must be positive")
        if self.max_layers < 1:
            raise ValueError("need at least one layer")

    def bits_for_bucket(self, size: int) -> int:
        return max(size - self.b_delta, 0)


@dataclass
class FlatLayer:
    bucket_count: int
    thresholds: np.ndarray  # uint16
    sizes: np.ndarray       # uint8, retained keys per bucket
    seeds: np.ndarray       # uint64, 0 for empty buckets
    xlo: np.ndarray         # uint64, low solution word
    xhi: np.ndarray         # uint64, high solution word
    offsets: np.ndarray     # uint64, global start position per bucket


@dataclass
class FlatMphf:
    n_keys: int
    config: FlatConfig
    layers: list[FlatLayer]
    fallback: list[tuple[int, int]]  # sorted (hi, lo)
    fallback_offset: int

    def query(self, kh: KeyHash) -> int:
        cfg = self.config
        for lnum, layer in enumerate(self.layers):
            bkt = bucket_assign(kh, layer.bucket_count, lnum)
            if threshold_value(kh, lnum) > int(layer.thresholds[bkt]):
                continue
            size = int(layer.sizes[bkt])
            if size == 0:
                continue  # only reachable by foreign keys
            b = cfg.bits_for_bucket(size)
            x = BitVector(b, (int(layer.xlo[bkt]) |
                              (int(layer.xhi[bkt]) << 64)) & ((1 << b) - 1))
            seed = int(layer.seeds[bkt])
            which = retrieval_row(kh, seed, b).dot(x)
            return int(layer.offsets[bkt]) + candidate(kh, seed, which, size, PLAIN)
        idx = _bisect_pair(self.fallback, (kh.hi, kh.lo))
        if idx is None:  # foreign key: any valid position
            return 0 if self.n_keys else 0
        return self.fallback_offset + idx

    def query_batch(self, hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
        """Vectorized query; foreign keys get arbitrary valid positions."""
        cfg = self.config
        hi = np.ascontiguousarray(hi, dtype=np.uint64)
        lo = np.ascontiguousarray(lo, dtype=np.uint64)
        out = np.zeros(len(hi), dtype=np.uint64)
        open_mask = np.ones(len(hi), dtype=bool)
        for lnum, layer in enumerate(self.layers):
            if not open_mask.any():
                break
            bkt = _npmix.bucket_assign_arr(hi, lo, layer.bucket_count, lnum)
            tv = _npmix.threshold_value_arr(hi, lo, lnum)
            take = open_mask & (tv <= layer.thresholds[bkt]) & (layer.sizes[bkt] > 0)
            if not take.any():
                continue
            thi, tlo = hi[take], lo[take]
            tb = bkt[take]
            sizes = layer.sizes[tb].astype(np.uint64)
            seeds = layer.seeds[tb]
            bw = np.maximum(sizes.astype(np.int64) - cfg.b_delta, 0).astype(np.uint64)
            w0 = _npmix.retrieval_word_arr(thi, tlo, seeds, 0)
            mask0 = np.where(bw >= 64, np.uint64(0xFFFFFFFFFFFFFFFF),
                             (np.uint64(1) << bw) - np.uint64(1))
            acc = np.bitwise_count(w0 & mask0 & layer.xlo[tb])
            if int(bw.max(initial=0)) > 64:
                w1 = _npmix.retrieval_word_arr(thi, tlo, seeds, 1)
                mask1 = (np.uint64(1) << (bw - np.uint64(64))) - np.uint64(1)
                mask1 = np.where(bw > 64, mask1, np.uint64(0))
                acc = acc + np.bitwise_count(w1 & mask1 & layer.xhi[tb])
            which = (acc & 1).astype(np.uint64)
            pos0 = _npmix.candidate_side_arr(thi, tlo, seeds, 0, sizes)
            pos1 = _npmix.candidate_side_arr(thi, tlo, seeds, 1, sizes)
            pos = np.where(which == 1, pos1, pos0)
            out[take] = layer.offsets[tb] + pos
            open_mask &= ~take
        if open_mask.any():
            idxs = np.nonzero(open_mask)[0]
            for i in idxs:
                kh = KeyHash(int(hi[i]), int(lo[i]))
                j = _bisect_pair(self.fallback, (kh.hi, kh.lo))
                out[i] = 0 if j is None else self.fallback_offset + j
        return out

    def to_bytes(self) -> bytes:
        return bitio.wrap_section(bitio.TAG_FLAT, _flat_payload(self))

    @classmethod
    def from_bytes(cls, data: bytes) -> "FlatMphf":
        tag, payload = bitio.unwrap_section(data)
        if tag != bitio.TAG_FLAT:
            raise bitio.FormatError(f"expected flat section, got tag {tag}", 6)
        return _flat_from_payload(payload)


def _bisect_pair(pairs: list[tuple[int, int]], key: tuple[int, int]):
    import bisect
    i = bisect.bisect_left(pairs, key)
    if i < len(pairs) and pairs[i] == key:
        return i
    return None


def _normalize_keys(keys) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(keys, tuple) and len(keys) == 2:
        hi = np.ascontiguousarray(keys[0], dtype=np.uint64)
        lo = np.ascontiguousarray(keys[1], dtype=np.uint64)
    else:
        hi = np.fromiter((kh.hi for kh in keys), dtype=np.uint64, count=len(keys))
        lo = np.fromiter((kh.lo for kh in keys), dtype=np.uint64, count=len(keys))
    if len(hi) != len(lo) or len(hi) == 0:
        raise ValueError("need a nonempty key set")
    order = np.lexsort((lo, hi))
    dup = (hi[order][1:] == hi[order][:-1]) & (lo[order][1:] == lo[order][:-1])
    if dup.any():
        raise ValueError("duplicate key")
    return hi, lo


def _choose_threshold(tvs_sorted: np.ndarray, capacity: int) -> int:
    """Largest 16-bit threshold keeping <= capacity keys; ties beyond
    capacity bump every tied key."""
    if len(tvs_sorted) <= capacity:
        return KEEP_ALL
    cut = int(tvs_sorted[capacity])
    if cut == 0:
        raise ConstructionFailure(
            "threshold tie overflow: more than base_n keys share value 0",
            SearchStats(PLAIN))
    return cut - 1


def build_flat(keys, cfg: FlatConfig = FlatConfig(), threads: int = 1) -> FlatMphf:
    """Assign keys to buckets layer by layer, bump overflow, build per-bucket
    base cases, stitch everything with prefix offsets."""
    hi, lo = _normalize_keys(keys)
    n_total = len(hi)
    layers: list[FlatLayer] = []
    offset = 0
    for lnum in range(cfg.max_layers):
        remaining = len(hi)
        if remaining == 0:
            break
        bucket_count = max(1, -(-remaining // max(int(cfg.base_n * cfg.bucket_load), 1)))
        bkt = _npmix.bucket_assign_arr(hi, lo, bucket_count, lnum)
        tv = _npmix.threshold_value_arr(hi, lo, lnum)
        order = np.lexsort((tv, bkt))
        sb, st = bkt[order], tv[order]
        starts = np.searchsorted(sb, np.arange(bucket_count, dtype=sb.dtype))
        ends = np.searchsorted(sb, np.arange(bucket_count, dtype=sb.dtype), side="right")
        thresholds = np.full(bucket_count, KEEP_ALL, dtype=np.uint16)
        sizes = np.zeros(bucket_count, dtype=np.uint8)
        keep_mask = np.zeros(remaining, dtype=bool)
        for bb in range(bucket_count):
            s, e = int(starts[bb]), int(ends[bb])
            if s == e:
                thresholds[bb] = 0
                continue
            thr = _choose_threshold(st[s:e], cfg.base_n)
            thresholds[bb] = thr
            kept = s + int(np.searchsorted(st[s:e], thr, side="right"))
            sizes[bb] = kept - s
            keep_mask[s:kept] = True
        seeds = np.zeros(bucket_count, dtype=np.uint64)
        xlo = np.zeros(bucket_count, dtype=np.uint64)
        xhi = np.zeros(bucket_count, dtype=np.uint64)
        shi, slo = hi[order], lo[order]

        def build_bucket(bb: int):
            size = int(sizes[bb])
            if size == 0:
                return
            s = int(starts[bb])
            bhi, blo = shi[s:s + size], slo[s:s + size]
            b = cfg.bits_for_bucket(size)
            found, seed, x_bytes, kstats = _kernel.plain_construct(
                bhi, blo, size, b, cfg.max_seeds)
            if not found:
                raise ConstructionFailure(
                    f"layer {lnum} bucket {bb} (n={size}, b={b}) exhausted "
                    f"{cfg.max_seeds} seeds",
                    SearchStats(PLAIN, int(kstats[0]), (0, 0), 0,
                                int(kstats[4]), int(kstats[5]), int(kstats[6])))
            xi = int.from_bytes(x_bytes, "little")
            seeds[bb] = seed
            xlo[bb] = xi & 0xFFFFFFFFFFFFFFFF
            xhi[bb] = xi >> 64

        if threads > 1:
            # slab per task: per-bucket tasks are a few ms and GIL handoffs
            # would dominate
            def build_span(span):
                for bb in span:
                    build_bucket(bb)

            spans = [range(w, bucket_count, threads) for w in range(threads)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(build_span, spans))
        else:
            for bb in range(bucket_count):
                build_bucket(bb)
        offsets = np.zeros(bucket_count, dtype=np.uint64)
        np.cumsum(sizes[:-1], out=offsets[1:])
        offsets += np.uint64(offset)
        offset += int(sizes.sum())
        layers.append(FlatLayer(bucket_count, thresholds, sizes, seeds,
                                xlo, xhi, offsets))
        bumped = ~keep_mask
        hi, lo = shi[bumped], slo[bumped]
    fallback = sorted(zip(hi.tolist(), lo.tolist()))
    return FlatMphf(n_total, cfg, layers, fallback, offset)


def query_flat(m: FlatMphf, kh: KeyHash) -> int:
    return m.query(kh)


@dataclass
class SpaceReport:
    """Exact serialized-size accounting, in bits."""

    n_keys: int
    seeds_bits: int
    x_bits: int
    threshold_bits: int
    offset_bits: int  # per-bucket size fields, from which offsets rebuild
    fallback_bits: int
    header_bits: int  # config varints, rice parameters, padding

    @property
    def total_bits(self) -> int:
        return (self.seeds_bits + self.x_bits + self.threshold_bits +
                self.offset_bits + self.fallback_bits + self.header_bits)

    def per_key(self, bits: int) -> float:
        return bits / self.n_keys

    def breakdown(self) -> dict[str, float]:
        return {
            "seeds": self.per_key(self.seeds_bits),
            "x": self.per_key(self.x_bits),
            "thresholds": self.per_key(self.threshold_bits),
            "offsets": self.per_key(self.offset_bits),
            "fallback": self.per_key(self.fallback_bits),
            "header": self.per_key(self.header_bits),
            "total": self.per_key(self.total_bits),
        }


def space_report(m: FlatMphf) -> SpaceReport:
    cfg = m.config
    size_width = int(cfg.base_n).bit_length()
    seeds_bits = x_bits = threshold_bits = offset_bits = header_bits = 0
    for layer in m.layers:
        nonempty = layer.sizes > 0
        vals = layer.seeds[nonempty].tolist()
        k = bitio.best_rice_k(vals)
        seeds_bits += bitio.rice_cost(vals, k) if vals else 0
        x_bits += int(sum(cfg.bits_for_bucket(int(s))
                          for s in layer.sizes[nonempty]))
        threshold_bits += 16 * layer.bucket_count
        offset_bits += size_width * layer.bucket_count
    fallback_bits = 128 * len(m.fallback)
    header_bits = 8 * len(_flat_payload(m)) - (seeds_bits + x_bits +
                                               threshold_bits + offset_bits +
                                               fallback_bits)
    return SpaceReport(m.n_keys, seeds_bits, x_bits, threshold_bits,
                       offset_bits, fallback_bits, header_bits)


def _flat_payload(m: FlatMphf) -> bytes:
    cfg = m.config
    out = bytearray()
    out += bitio.encode_varint(m.n_keys)
    out += bitio.encode_varint(cfg.base_n)
    out += bitio.encode_varint(cfg.b_delta)
    out += bitio.encode_varint(cfg.max_layers)
    out += bitio.encode_varint(int(round(cfg.bucket_load * 1_000_000)))
    out += bitio.encode_varint(cfg.max_seeds)
    out.append(len(m.layers))
    size_width = int(cfg.base_n).bit_length()
    for layer in m.layers:
        out += bitio.encode_varint(layer.bucket_count)
        nonempty = layer.sizes > 0
        vals = layer.seeds[nonempty].tolist()
        k = bitio.best_rice_k(vals)
        out.append(k)
        w = bitio.BitWriter()
        for t in layer.thresholds.tolist():
            w.write(int(t), 16)
        for s in layer.sizes.tolist():
            w.write(int(s), size_width)
        for v in vals:
            w.write_rice(int(v), k)
        for bb in np.nonzero(nonempty)[0]:
            b = cfg.bits_for_bucket(int(layer.sizes[bb]))
            x = (int(layer.xlo[bb]) | (int(layer.xhi[bb]) << 64)) & ((1 << b) - 1)
            w.write(x, b)
        stream = w.to_bytes()
        out += bitio.encode_varint(len(stream))
        out += stream
    out += bitio.encode_varint(len(m.fallback))
    for h, l in m.fallback:
        out += h.to_bytes(8, "little")
        out += l.to_bytes(8, "little")
    return bytes(out)


def _flat_from_payload(payload: bytes) -> FlatMphf:
    off = 0
    n_keys, off = bitio.decode_varint(payload, off)
    base_n, off = bitio.decode_varint(payload, off)
    b_delta, off = bitio.decode_varint(payload, off)
    max_layers, off = bitio.decode_varint(payload, off)
    load_micro, off = bitio.decode_varint(payload, off)
    max_seeds, off = bitio.decode_varint(payload, off)
    cfg = FlatConfig(base_n, b_delta, load_micro / 1_000_000, max_layers, max_seeds)
    if off >= len(payload):
        raise bitio.FormatError("truncated flat payload", off)
    layer_count = payload[off]
    off += 1
    size_width = int(cfg.base_n).bit_length()
    layers = []
    offset = 0
    for _ in range(layer_count):
        bucket_count, off = bitio.decode_varint(payload, off)
        if off >= len(payload):
            raise bitio.FormatError("truncated layer header", off)
        k = payload[off]
        off += 1
        stream_len, off = bitio.decode_varint(payload, off)
        if off + stream_len > len(payload):
            raise bitio.FormatError("truncated layer stream", off)
        r = bitio.BitReader(payload[off:off + stream_len])
        off += stream_len
        thresholds = np.array([r.read(16) for _ in range(bucket_count)],
                              dtype=np.uint16)
        sizes = np.array([r.read(size_width) for _ in range(bucket_count)],
                         dtype=np.uint8)
        if sizes.max(initial=0) > base_n:
            raise bitio.FormatError("bucket size exceeds base_n", off)
        seeds = np.zeros(bucket_count, dtype=np.uint64)
        xlo = np.zeros(bucket_count, dtype=np.uint64)
        xhi = np.zeros(bucket_count, dtype=np.uint64)
        nonempty = np.nonzero(sizes > 0)[0]
        for bb in nonempty:
            seeds[bb] = r.read_rice(k)
        for bb in nonempty:
            b = cfg.bits_for_bucket(int(sizes[bb]))
            x = r.read(b)
            xlo[bb] = x & 0xFFFFFFFFFFFFFFFF
            xhi[bb] = x >> 64
        offsets = np.zeros(bucket_count, dtype=np.uint64)
        np.cumsum(sizes[:-1], out=offsets[1:])
        offsets += np.uint64(offset)
        offset += int(sizes.sum())
        layers.append(FlatLayer(bucket_count, thresholds, sizes, seeds,
                                xlo, xhi, offsets))
    count, off = bitio.decode_varint(payload, off)
    if off + 16 * count != len(payload):
        raise bitio.FormatError("fallback length mismatch", off)
    fallback = []
    for _ in range(count):
        h = int.from_bytes(payload[off:off + 8], "little")
        l = int.from_bytes(payload[off + 8:off + 16], "little")
        fallback.append((h, l))
        off += 16
    if fallback != sorted(fallback):
        raise bitio.FormatError("fallback map not sorted", off)
    return FlatMphf(n_keys, cfg, layers, fallback, offset)
