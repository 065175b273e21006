"""Betti numbers of pixel adjacency graphs.

A graph (optionally with filled triangles) is treated as a simplicial complex
of dimension <= 2.  Counting is done over the two-element field, where the
boundary operators are plain 0/1 incidence matrices and the usual alternating
signs vanish, so ranks come from bit-packed Gaussian elimination.

Two computation paths are kept deliberately:

* ``betti`` derives (b0, b1) from boundary-matrix ranks;
* ``betti_graph_fast`` uses component counting and the Euler relation
  b1 = E - V + b0, valid whenever no triangle is filled.

Each serves as a permanent cross-check on the other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .topology import AdjacencyGraph

__all__ = [
    "SimplicialComplex",
    "BoundaryMatrix",
    "BettiProfile",
    "complex_from_graph",
    "boundary_matrix",
    "gf2_rank",
    "gf2_multiply",
    "betti",
    "betti_graph_fast",
]


@dataclass(frozen=True)
class BettiProfile:
    """Connected-component count (b0) and independent-cycle count (b1)."""

    b0: int
    b1: int

    def as_pair(self) -> tuple[int, int]:
        return (self.b0, self.b1)


@dataclass(frozen=True)
class SimplicialComplex:
    """Vertices, edges, and (optional) triangles with validated face closure.

    Edges are index pairs (i, j) with i < j; triangles are triples
    (i, j, k) with i < j < k whose three edges must all be present.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    triangles: tuple[tuple[int, int, int], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < j < self.vertex_count):
                raise ValueError(f"edge ({i}, {j}) is not an ordered pair of vertex ids")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        tri_seen = set()
        for i, j, k in self.triangles:
            if not i < j < k:
                raise ValueError(f"triangle ({i}, {j}, {k}) is not strictly ordered")
            for face in ((i, j), (i, k), (j, k)):
                if face not in seen:
                    raise ValueError(f"triangle ({i}, {j}, {k}) misses edge {face}")
            if (i, j, k) in tri_seen:
                raise ValueError(f"duplicate triangle ({i}, {j}, {k})")
            tri_seen.add((i, j, k))


@dataclass(frozen=True)
class BoundaryMatrix:
    """0/1 matrix over GF(2); each row is an int whose bit c is entry [row][c]."""

    rows: int
    cols: int
    row_bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.row_bits) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.row_bits)}")
        limit = 1 << self.cols
        for r, bits in enumerate(self.row_bits):
            if not 0 <= bits < limit:
                raise ValueError(f"row {r} has bits outside {self.cols} columns")

    def is_zero(self) -> bool:
        return all(r == 0 for r in self.row_bits)


def complex_from_graph(g: AdjacencyGraph, fill_triangles: bool = False) -> SimplicialComplex:
    """Lift an adjacency graph to a complex, optionally filling 3-cliques."""
    triangles: list[tuple[int, int, int]] = []
    if fill_triangles:
        nbrs: dict[int, set[int]] = {}
        for i, j in g.edges:
            nbrs.setdefault(i, set()).add(j)
            nbrs.setdefault(j, set()).add(i)
        for i, j in g.edges:
            for k in sorted(nbrs[i] & nbrs[j]):
                if k > j:
                    triangles.append((i, j, k))
        triangles.sort()
    return SimplicialComplex(len(g.vertices), g.edges, tuple(triangles))


def boundary_matrix(cx: SimplicialComplex, k: int) -> BoundaryMatrix:
    """Boundary operator from k-simplices to (k-1)-simplices, k in {1, 2}."""
    if k == 1:
        rows = [0] * cx.vertex_count
        for c, (i, j) in enumerate(cx.edges):
            rows[i] |= 1 << c
            rows[j] |= 1 << c
        return BoundaryMatrix(cx.vertex_count, len(cx.edges), tuple(rows))
    if k == 2:
        edge_index = {e: c for c, e in enumerate(cx.edges)}
        rows = [0] * len(cx.edges)
        for c, (i, j, kk) in enumerate(cx.triangles):
            for face in ((i, j), (i, kk), (j, kk)):
                rows[edge_index[face]] |= 1 << c
        return BoundaryMatrix(len(cx.edges), len(cx.triangles), tuple(rows))
    raise ValueError(f"no boundary operator for k={k} (only k=1 and k=2)")


def gf2_rank(m: BoundaryMatrix) -> int:
    """Rank over GF(2) by Gaussian elimination on bit-packed rows."""
    pivots: dict[int, int] = {}
    rank = 0
    for row in m.row_bits:
        cur = row
        while cur:
            lead = cur.bit_length() - 1
            piv = pivots.get(lead)
            if piv is None:
                pivots[lead] = cur
                rank += 1
                break
            cur ^= piv
    return rank


def gf2_multiply(a: BoundaryMatrix, b: BoundaryMatrix) -> BoundaryMatrix:
    """Matrix product over GF(2) (used to check that composed boundaries vanish)."""
    if a.cols != b.rows:
        raise ValueError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    out = []
    for bits in a.row_bits:
        acc = 0
        rest = bits
        while rest:
            low = rest & -rest
            acc ^= b.row_bits[low.bit_length() - 1]
            rest ^= low
        out.append(acc)
    return BoundaryMatrix(a.rows, b.cols, tuple(out))


def betti(cx: SimplicialComplex) -> BettiProfile:
    """(b0, b1) from boundary-matrix ranks; the empty complex yields (0, 0)."""
    if cx.vertex_count == 0:
        if cx.edges or cx.triangles:
            raise ValueError("complex with simplices but no vertices")
        return BettiProfile(0, 0)
    r1 = gf2_rank(boundary_matrix(cx, 1))
    r2 = gf2_rank(boundary_matrix(cx, 2))
    b0 = cx.vertex_count - r1
    b1 = (len(cx.edges) - r1) - r2
    return BettiProfile(b0, b1)


def betti_graph_fast(g: AdjacencyGraph) -> BettiProfile:
    """(b0, b1) of a bare graph: b0 by union-find, b1 = E - V + b0.

    Valid only when the complex has no filled triangles, which holds for
    every 4-adjacency pixel graph (neighbors of a pixel are never mutually
    4-adjacent, so such graphs are triangle-free).
    """
    n = len(g.vertices)
    if n == 0:
        return BettiProfile(0, 0)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    b0 = n
    for i, j in g.edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            b0 -= 1
    b1 = len(g.edges) - n + b0
    return BettiProfile(b0, b1)
