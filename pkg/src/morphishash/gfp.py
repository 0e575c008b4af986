"""Dense linear solving over small prime fields F_p (appendix applications)."""

from __future__ import annotations

from typing import Optional, Sequence

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin for machine-word sized p."""
    if p < 2:
        return False
    for q in _MR_WITNESSES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class PrimeField:
    """Field context; rejects non-prime moduli at construction."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, self.p - 2, self.p)


class PrimeFieldVector:
    __slots__ = ("p", "entries")

    def __init__(self, p: int, entries: Sequence[int]):
        PrimeField(p)
        for e in entries:
            if not 0 <= e < p:
                raise ValueError(f"entry {e} outside [0, {p})")
        self.p = p
        self.entries = tuple(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, i: int) -> int:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PrimeFieldVector)
                and self.p == other.p and self.entries == other.entries)

    def __repr__(self) -> str:
        return f"PrimeFieldVector(p={self.p}, {list(self.entries)})"


def gfp_matvec(rows: Sequence[Sequence[int]], x: PrimeFieldVector) -> PrimeFieldVector:
    p = x.p
    out = [sum(r[j] * x[j] for j in range(len(x))) % p for r in rows]
    return PrimeFieldVector(p, out)


def gfp_solve(rows: Sequence[Sequence[int]], d: Sequence[int], p: int
              ) -> Optional[PrimeFieldVector]:
    """Solve rows·x = d mod p; None when inconsistent.

    Same contract as gf2_solve: first-nonzero pivot per column in order,
    free variables fixed to 0, inputs untouched.
    """
    field = PrimeField(p)
    m = len(rows)
    if len(d) != m:
        raise ValueError(f"rhs length {len(d)} vs {m} rows")
    k = len(rows[0]) if m else 0
    work = [[rows[i][j] % p for j in range(k)] + [d[i] % p] for i in range(m)]
    for r in work:
        if len(r) != k + 1:
            raise ValueError("ragged matrix")
    pivots: list[tuple[int, int]] = []
    rank = 0
    for col in range(k):
        pivot = None
        for i in range(rank, m):
            if work[i][col]:
                pivot = i
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = field.inv(work[rank][col])
        work[rank] = [(v * inv) % p for v in work[rank]]
        for i in range(rank + 1, m):
            f = work[i][col]
            if f:
                work[i] = [(a - f * b) % p for a, b in zip(work[i], work[rank])]
        pivots.append((col, rank))
        rank += 1
    for i in range(rank, m):
        # coefficient part is fully eliminated below the pivots
        if work[i][k]:
            return None
    x = [0] * k
    for col, r in reversed(pivots):
        acc = work[r][k]
        for j in range(col + 1, k):
            if work[r][j]:
                acc = (acc - work[r][j] * x[j]) % p
        x[col] = acc
    return PrimeFieldVector(p, x)
