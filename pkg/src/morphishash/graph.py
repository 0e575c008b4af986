"""The hashed multigraph: n nodes, one edge per key at its candidate positions.

Keys are edges connecting their two candidate positions; loops and parallel
edges are allowed. A seed is usable iff the graph is a pseudoforest, i.e.
iff it can be oriented so that every node has indegree exactly 1.
"""

from __future__ import annotations

from typing import Sequence

from .gf2 import BitMatrix, BitVector
from .hashing import BIPARTITE, PLAIN, KeyHash, candidate, tweak, derive, reduce_range
from .hashing import STREAM_CAND0, STREAM_CAND1


class DuplicateKeyError(ValueError):
    pass


class HashedGraph:
    __slots__ = ("n", "variant", "u", "v")

    def __init__(self, n: int, u: Sequence[int], v: Sequence[int],
                 variant: str = PLAIN):
        if len(u) != n or len(v) != n:
            raise ValueError("need exactly n edges on n nodes")
        self.n = n
        self.variant = variant
        self.u = list(u)
        self.v = list(v)


def build_graph(key_hashes: Sequence[KeyHash], seed, n: int,
                variant: str = PLAIN) -> HashedGraph:
    """Edge j runs from the which=0 candidate to the which=1 candidate of key j.

    `seed` is a single value for the plain variant and an (s0, s1) pair for
    the bipartite one.
    """
    if len(key_hashes) != n:
        raise ValueError(f"{len(key_hashes)} keys for n={n}")
    if len(set(key_hashes)) != n:
        raise DuplicateKeyError("duplicate key")
    if variant == BIPARTITE:
        s0, s1 = seed
    else:
        s0 = s1 = seed
    u = [candidate(kh, s0, 0, n, variant) for kh in key_hashes]
    v = [candidate(kh, s1, 1, n, variant) for kh in key_hashes]
    return HashedGraph(n, u, v, variant)


class _UnionFind:
    __slots__ = ("parent", "nodes", "edges")

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.nodes = [1] * n
        self.edges = [0] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def add_edge(self, a: int, b: int) -> int:
        """Union endpoints, count the edge; returns the component root."""
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            self.edges[ra] += 1
            return ra
        if self.nodes[ra] < self.nodes[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.nodes[ra] += self.nodes[rb]
        self.edges[ra] += self.edges[rb] + 1
        return ra


def is_pseudoforest(g: HashedGraph) -> bool:
    """True iff every component has exactly as many edges as nodes.

    With n edges on n nodes it suffices that no component ever exceeds
    its node count in edges, so the union-find aborts at the first excess.
    """
    uf = _UnionFind(g.n)
    for a, b in zip(g.u, g.v):
        r = uf.add_edge(a, b)
        if uf.edges[r] > uf.nodes[r]:
            return False
    return True


def count_components(g: HashedGraph) -> int:
    """Connected components of the multigraph (isolated nodes count)."""
    uf = _UnionFind(g.n)
    for a, b in zip(g.u, g.v):
        uf.add_edge(a, b)
    return sum(1 for i in range(g.n) if uf.find(i) == i)


def compute_d(g: HashedGraph) -> BitVector:
    """Parity vector: d_i = (number of keys whose 0-candidate is i, plus 1) mod 2."""
    bits = 0
    for a in g.u:
        bits ^= 1 << a
    bits ^= (1 << g.n) - 1
    return BitVector(g.n, bits)


def incidence_matrix(g: HashedGraph) -> BitMatrix:
    """A[i][j] = 1 iff exactly one endpoint of edge j is node i (loops: zero column)."""
    rows = [0] * g.n
    for j, (a, b) in enumerate(zip(g.u, g.v)):
        if a != b:
            rows[a] |= 1 << j
            rows[b] |= 1 << j
    return BitMatrix(g.n, g.n, rows)


def accumulate_ah(g: HashedGraph, rows: Sequence[BitVector]) -> BitMatrix:
    """Row i of the product of the incidence matrix with the retrieval rows.

    Folds the multiplication into one pass: every non-loop edge XORs its
    retrieval row into both endpoint rows.
    """
    if len(rows) != g.n:
        raise ValueError("need one retrieval row per key")
    b = rows[0].n if rows else 0
    out = [0] * g.n
    for j, (a, c) in enumerate(zip(g.u, g.v)):
        if a != c:
            bits = rows[j].bits
            out[a] ^= bits
            out[c] ^= bits
    return BitMatrix(g.n, b, out)


def orient_pseudoforest(g: HashedGraph) -> BitVector:
    """An orientation y with every node at indegree exactly 1.

    y_j = 0 points edge j at u_j, y_j = 1 at v_j. Tree edges are forced by
    peeling degree-1 nodes; each remaining cycle is walked from its lowest
    node toward its lowest-indexed unused edge. Only valid on pseudoforests.
    """
    n = g.n
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]  # (edge, other)
    degree = [0] * n
    for j, (a, b) in enumerate(zip(g.u, g.v)):
        adj[a].append((j, b))
        degree[a] += 1
        if a != b:
            adj[b].append((j, a))
            degree[b] += 1
        else:
            degree[a] += 1  # loop occupies two degree slots at one node
    y = 0
    target = [-1] * n  # edge index -> oriented-toward node
    used = [False] * n
    # peel: a degree-1 node must receive its only incident edge
    stack = [i for i in range(n) if degree[i] == 1]
    while stack:
        node = stack.pop()
        if degree[node] != 1:
            continue
        j = other = None
        for jj, oo in adj[node]:
            if not used[jj]:
                j, other = jj, oo
                break
        if j is None:
            raise ValueError("not a pseudoforest")
        used[j] = True
        target[j] = node
        if g.v[j] == node and g.u[j] != g.v[j]:
            y |= 1 << j
        degree[node] -= 1
        degree[other] -= 1
        if degree[other] == 1:
            stack.append(other)
    # remaining edges form disjoint cycles; orient each one consistently,
    # starting at its lowest node
    for start in range(n):
        if degree[start] == 0:
            continue
        node = start
        while True:
            j = nxt = None
            for jj, oo in adj[node]:
                if not used[jj]:
                    j, nxt = jj, oo
                    break
            if j is None:
                raise ValueError("not a pseudoforest")
            used[j] = True
            target[j] = nxt
            if g.v[j] == nxt and g.u[j] != g.v[j]:
                # parallel edges: an edge with u==v==node is a loop (y=0);
                # otherwise orienting toward v sets the bit
                if not (g.u[j] == nxt and g.v[j] == nxt):
                    y |= 1 << j
            degree[node] -= 1
            degree[nxt] -= 1
            node = nxt
            if node == start and degree[node] == 0:
                break
    if sorted(target) != list(range(n)):
        raise ValueError("not a pseudoforest")
    return BitVector(n, y)


def surjectivity_filter(key_hashes: Sequence[KeyHash], seed: int, side: int,
                        half: int) -> bool:
    """True iff every position of the side's range is hit by some candidate."""
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    stream = STREAM_CAND0 if side == 0 else STREAM_CAND1
    tw = tweak(seed, stream)
    mask = 0
    for kh in key_hashes:
        mask |= 1 << reduce_range(derive(kh, tw), half)
    return mask == (1 << half) - 1
