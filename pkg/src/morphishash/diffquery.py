"""Retrieval structure answering only differences f(a) - f(b) mod p.

Any constant shift of f preserves all differences, so one value's worth of
information is redundant: n-1 consecutive-pair constraints over F_p folded
with per-key retrieval rows store the function in (n-1) digits of
ceil(log2 p) bits each.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import bitio
from .gfp import PrimeField, PrimeFieldVector, gfp_solve
from .hashing import KeyHash, retrieval_row_gfp


@dataclass
class DifferenceRetrieval:
    p: int
    n: int
    h_seed: int
    x: PrimeFieldVector  # b = n - 1 digits
    retries: int = 0

    @property
    def b(self) -> int:
        return self.n - 1

    def query_diff(self, a: KeyHash, b: KeyHash) -> int:
        ra = retrieval_row_gfp(a, self.h_seed, self.b, self.p)
        rb = retrieval_row_gfp(b, self.h_seed, self.b, self.p)
        return sum((ra[t] - rb[t]) * self.x[t] for t in range(self.b)) % self.p

    def digit_bits(self) -> int:
        """Fixed digit width: ceil(log2 p), computed exactly."""
        return (self.p - 1).bit_length()

    def to_bytes(self) -> bytes:
        w = bitio.BitWriter()
        width = self.digit_bits()
        for digit in self.x:
            w.write(digit, width)
        payload = (bitio.encode_varint(self.p)
                   + bitio.encode_varint(self.n)
                   + bitio.encode_varint(self.h_seed)
                   + w.to_bytes())
        return bitio.wrap_section(bitio.TAG_DIFF_RETRIEVAL, payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> "DifferenceRetrieval":
        tag, payload = bitio.unwrap_section(data)
        if tag != bitio.TAG_DIFF_RETRIEVAL:
            raise bitio.FormatError(f"expected diff section, got tag {tag}", 6)
        off = 0
        p, off = bitio.decode_varint(payload, off)
        n, off = bitio.decode_varint(payload, off)
        seed, off = bitio.decode_varint(payload, off)
        if n < 1:
            raise bitio.FormatError("empty instance", off)
        width = (p - 1).bit_length()
        b = n - 1
        if len(payload) - off != (b * width + 7) // 8:
            raise bitio.FormatError("bad digit payload length", off)
        r = bitio.BitReader(payload[off:])
        digits = [r.read(width) for _ in range(b)]
        for d in digits:
            if d >= p:
                raise bitio.FormatError(f"digit {d} >= p", off)
        return cls(p, n, seed, PrimeFieldVector(p, digits))


def build_difference_retrieval(key_hashes: Sequence[KeyHash], f, p: int,
                               max_retries: int = 64, seed_start: int = 0
                               ) -> DifferenceRetrieval:
    """Fix the given key order; one constraint per consecutive pair."""
    PrimeField(p)
    n = len(key_hashes)
    if n < 1:
        raise ValueError("need at least one key")
    if len(set(key_hashes)) != n:
        raise ValueError("duplicate key")
    values = [f(kh) % p for kh in key_hashes]
    b = n - 1
    for attempt in range(max_retries):
        h_seed = seed_start + attempt
        rows = [retrieval_row_gfp(kh, h_seed, b, p) for kh in key_hashes]
        sys_rows = [[(rows[i][t] - rows[i + 1][t]) % p for t in range(b)]
                    for i in range(n - 1)]
        rhs = [(values[i] - values[i + 1]) % p for i in range(n - 1)]
        if b == 0:
            return DifferenceRetrieval(p, n, h_seed, PrimeFieldVector(p, []),
                                       retries=attempt)
        x = gfp_solve(sys_rows, rhs, p)
        if x is None:
            continue
        return DifferenceRetrieval(p, n, h_seed, x, retries=attempt)
    raise RuntimeError(f"no solvable row seed within {max_retries} retries")


def query_diff(d: DifferenceRetrieval, a: KeyHash, b: KeyHash) -> int:
    return d.query_diff(a, b)
