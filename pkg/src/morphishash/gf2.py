"""Packed GF(2) linear algebra: bit vectors, bit matrices, solve and rank.

Rows and vectors are backed by Python ints used as bitsets; bit i of a
vector is ``(bits >> i) & 1``, i.e. little-endian bit order, consistent
with the serialized layout (LSB-first bytes, 64-bit little-endian words).
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence


class DimensionMismatch(ValueError):
    """Incompatible shapes: a programming error, distinct from 'no solution'."""


class BitVector:
    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise ValueError("negative length")
        if bits < 0 or bits >> n:
            raise ValueError("bits set beyond vector length")
        self.n = n
        self.bits = bits

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        value = 0
        n = 0
        for b in bits:
            if b:
                value |= 1 << n
            n += 1
        return cls(n, value)

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> "BitVector":
        if len(data) != (n + 7) // 8:
            raise ValueError("byte length does not match bit count")
        value = int.from_bytes(data, "little")
        if value >> n:
            raise ValueError("padding bits are not zero")
        return cls(n, value)

    def get(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def dot(self, other: "BitVector") -> int:
        """GF(2) inner product: parity of the popcount of the wordwise AND."""
        if self.n != other.n:
            raise DimensionMismatch(f"dot: {self.n} vs {other.n}")
        return (self.bits & other.bits).bit_count() & 1

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.n + 7) // 8, "little")

    def to_words(self) -> list[int]:
        """Packed 64-bit words, little-endian bit order within each word."""
        return [(self.bits >> (64 * w)) & ((1 << 64) - 1)
                for w in range((self.n + 63) // 64)]

    def __xor__(self, other: "BitVector") -> "BitVector":
        if self.n != other.n:
            raise DimensionMismatch(f"xor: {self.n} vs {other.n}")
        return BitVector(self.n, self.bits ^ other.bits)

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return ((self.bits >> i) & 1 for i in range(self.n))

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitVector)
                and self.n == other.n and self.bits == other.bits)

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def __repr__(self) -> str:
        return f"BitVector({self.n}, 0b{self.bits:0{max(self.n, 1)}b})"


class BitMatrix:
    """Row-major packed GF(2) matrix; each row is an int bitset."""

    __slots__ = ("rows", "cols", "_r")

    def __init__(self, rows: int, cols: int, row_bits: Optional[list[int]] = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative shape")
        if row_bits is None:
            row_bits = [0] * rows
        if len(row_bits) != rows:
            raise DimensionMismatch("row count mismatch")
        for r in row_bits:
            if r < 0 or r >> cols:
                raise ValueError("row bits set beyond column count")
        self.rows = rows
        self.cols = cols
        self._r = row_bits

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector]) -> "BitMatrix":
        if not rows:
            return cls(0, 0)
        cols = rows[0].n
        for r in rows:
            if r.n != cols:
                raise DimensionMismatch("ragged rows")
        return cls(len(rows), cols, [r.bits for r in rows])

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self._r[i])

    def row_bits(self, i: int) -> int:
        return self._r[i]

    def set_bit(self, i: int, j: int, value: int = 1) -> None:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        if value:
            self._r[i] |= 1 << j
        else:
            self._r[i] &= ~(1 << j)

    def matvec(self, x: BitVector) -> BitVector:
        if x.n != self.cols:
            raise DimensionMismatch(f"matvec: {self.cols} cols vs {x.n}")
        out = 0
        for i, r in enumerate(self._r):
            out |= ((r & x.bits).bit_count() & 1) << i
        return BitVector(self.rows, out)

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        """Naive product, used as the oracle for the folded accumulation."""
        if self.cols != other.rows:
            raise DimensionMismatch("matmul shapes")
        out = []
        for i in range(self.rows):
            acc = 0
            bits = self._r[i]
            while bits:
                j = (bits & -bits).bit_length() - 1
                acc ^= other._r[j]
                bits &= bits - 1
            out.append(acc)
        return BitMatrix(self.rows, other.cols, out)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BitMatrix) and self.rows == other.rows
                and self.cols == other.cols and self._r == other._r)

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def solve_bits(row_bits: Sequence[int], cols: int, d_bits: int) -> Optional[int]:
    """Raw-bitset core of gf2_solve: rows as int bitsets, rhs as a bitset.

    Deterministic: columns are processed in order, the pivot is the first
    remaining row with a 1 in the current column, and free variables are
    fixed to 0. Returns the solution bitset, or None when inconsistent.
    """
    k = cols
    aug = [row_bits[i] | (((d_bits >> i) & 1) << k) for i in range(len(row_bits))]
    pivots: list[tuple[int, int]] = []  # (column, row index in echelon order)
    rank = 0
    for col in range(k):
        pivot = None
        for i in range(rank, len(aug)):
            if (aug[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        aug[rank], aug[pivot] = aug[pivot], aug[rank]
        for i in range(rank + 1, len(aug)):
            if (aug[i] >> col) & 1:
                aug[i] ^= aug[rank]
        pivots.append((col, rank))
        rank += 1
    for i in range(rank, len(aug)):
        if aug[i]:  # reduced to 0 = 1
            return None
    x = 0
    mask = (1 << k) - 1
    for col, r in reversed(pivots):
        row = aug[r]
        bit = (row >> k) & 1
        # x holds only already-assigned pivot columns (> col); free columns stay 0
        bit ^= (row & x & mask).bit_count() & 1
        if bit:
            x |= 1 << col
    return x


def gf2_solve(a: BitMatrix, d: BitVector) -> Optional[BitVector]:
    """Solve a·x = d over GF(2); None when inconsistent (see solve_bits)."""
    if a.rows != d.n:
        raise DimensionMismatch(f"solve: {a.rows} rows vs rhs {d.n}")
    x = solve_bits(a._r, a.cols, d.bits)
    return None if x is None else BitVector(a.cols, x)


def gf2_rank(a: BitMatrix) -> int:
    """GF(2) row rank by elimination."""
    work = list(a._r)
    rank = 0
    for col in range(a.cols):
        pivot = None
        for i in range(rank, len(work)):
            if (work[i] >> col) & 1:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for i in range(rank + 1, len(work)):
            if (work[i] >> col) & 1:
                work[i] ^= work[rank]
        rank += 1
    return rank


def gf2_defect(a: BitMatrix) -> int:
    """Columns minus rank."""
    return a.cols - gf2_rank(a)
