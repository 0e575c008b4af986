"""Compressed storage of a proper 2-coloring, queryable without the edges.

Each edge {v, w} contributes the constraint color(v) + color(w) = 1 over
GF(2); folding the constraint matrix with per-vertex retrieval rows and
solving against all-ones stores the coloring in n - c bits, where c is the
number of connected components (each component's coloring can be flipped,
so n - c bits is the lower bound).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import bitio
from .gf2 import BitVector, solve_bits
from .hashing import retrieval_row, vertex_hash


class NotTwoColorable(ValueError):
    pass


@dataclass
class CompressedColoring:
    n_vertices: int
    components: int
    h_seed: int
    x: BitVector  # exactly n_vertices - components bits
    retries: int = 0

    @property
    def b(self) -> int:
        return self.n_vertices - self.components

    def query(self, v: int) -> int:
        if not 0 <= v < self.n_vertices:
            raise IndexError(v)
        return retrieval_row(vertex_hash(v), self.h_seed, self.b).dot(self.x)

    def to_bytes(self) -> bytes:
        payload = (bitio.encode_varint(self.n_vertices)
                   + bitio.encode_varint(self.components)
                   + bitio.encode_varint(self.h_seed)
                   + self.x.to_bytes())
        return bitio.wrap_section(bitio.TAG_COLORING, payload)

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedColoring":
        tag, payload = bitio.unwrap_section(data)
        if tag != bitio.TAG_COLORING:
            raise bitio.FormatError(f"expected coloring section, got tag {tag}", 6)
        off = 0
        n, off = bitio.decode_varint(payload, off)
        c, off = bitio.decode_varint(payload, off)
        seed, off = bitio.decode_varint(payload, off)
        b = n - c
        if c > n or len(payload) - off != (b + 7) // 8:
            raise bitio.FormatError("bad coloring payload", off)
        return cls(n, c, seed, BitVector.from_bytes(payload[off:], b))


def _validate_two_coloring(n_vertices: int, edges, f) -> int:
    """Check f is proper (distinguishing odd cycles from a wrong f);
    returns the component count."""
    adj: list[list[int]] = [[] for _ in range(n_vertices)]
    for v, w in edges:
        if not (0 <= v < n_vertices and 0 <= w < n_vertices):
            raise ValueError(f"edge ({v}, {w}) out of range")
        adj[v].append(w)
        adj[w].append(v)
    color = [-1] * n_vertices
    components = 0
    for start in range(n_vertices):
        if color[start] >= 0:
            continue
        components += 1
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if color[w] < 0:
                    color[w] = color[v] ^ 1
                    stack.append(w)
                elif color[w] == color[v]:
                    raise NotTwoColorable(
                        f"odd cycle through edge ({v}, {w})")
    for v, w in edges:
        if f(v) == f(w) or f(v) not in (0, 1) or f(w) not in (0, 1):
            raise ValueError(f"f is not a proper 2-coloring at edge ({v}, {w})")
    return components


def build_two_coloring(n_vertices: int, edges: Sequence[tuple[int, int]], f,
                       max_retries: int = 64, seed_start: int = 0
                       ) -> CompressedColoring:
    """Store the coloring in exactly n - c bits; retries a fresh row seed
    whenever the folded system misses the coloring subspace."""
    components = _validate_two_coloring(n_vertices, edges, f)
    b = n_vertices - components
    vhs = [vertex_hash(v) for v in range(n_vertices)]
    for attempt in range(max_retries):
        h_seed = seed_start + attempt
        rows = [retrieval_row(vh, h_seed, b).bits for vh in vhs]
        sys_rows = [rows[v] ^ rows[w] for v, w in edges]
        ones = (1 << len(sys_rows)) - 1
        x = solve_bits(sys_rows, b, ones)
        if x is None:
            continue
        return CompressedColoring(n_vertices, components, h_seed,
                                  BitVector(b, x), retries=attempt)
    raise RuntimeError(f"no solvable row seed within {max_retries} retries")


def query_color(c: CompressedColoring, v: int) -> int:
    return c.query(v)
