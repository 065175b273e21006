"""Betti numbers: boundary matrices over GF(2) versus graph counting."""

from __future__ import annotations

import numpy as np
import pytest

from helpers import pixelset_from_art
from jordanmask.homology import (
    BettiProfile,
    BoundaryMatrix,
    SimplicialComplex,
    betti,
    betti_graph_fast,
    boundary_matrix,
    complex_from_graph,
    gf2_multiply,
    gf2_rank,
)
from jordanmask.topology import Adjacency, PixelSet, build_graph, connected_components

RING = pixelset_from_art(
    """
    ###
    #.#
    ###
    """
)


def _four_graph(s):
    return build_graph(s, Adjacency.FOUR)


def test_complex_from_path_of_three():
    g = _four_graph(PixelSet.from_points(5, 1, [(2, 1), (3, 1), (4, 1)]))
    cx = complex_from_graph(g, fill_triangles=True)
    assert cx.vertex_count == 3
    assert cx.edges == ((0, 1), (1, 2))
    assert cx.triangles == ()


def test_complex_from_filled_block_under_eight():
    g = build_graph(
        PixelSet.from_points(2, 2, [(1, 1), (2, 1), (1, 2), (2, 2)]), Adjacency.EIGHT
    )
    cx = complex_from_graph(g, fill_triangles=True)
    assert cx.vertex_count == 4
    assert len(cx.edges) == 6
    assert len(cx.triangles) == 4  # every 3-subset of K4


def test_four_graphs_never_produce_triangles():
    rng = np.random.default_rng(61)
    for _ in range(40):
        s = PixelSet.from_mask(rng.random((10, 10)) < 0.6)
        cx = complex_from_graph(_four_graph(s), fill_triangles=True)
        assert cx.triangles == ()


def test_complex_validation_rejects_broken_faces():
    with pytest.raises(ValueError):
        SimplicialComplex(3, ((0, 1),), ((0, 1, 2),))  # missing edges (0,2), (1,2)
    with pytest.raises(ValueError):
        SimplicialComplex(2, ((0, 1), (0, 1)))
    with pytest.raises(ValueError):
        SimplicialComplex(2, ((1, 0),))


def test_boundary_of_a_single_edge():
    m = boundary_matrix(SimplicialComplex(2, ((0, 1),)), 1)
    assert (m.rows, m.cols) == (2, 1)
    assert m.row_bits == (1, 1)  # both endpoints hit the lone column


def test_boundary_of_a_single_triangle():
    cx = SimplicialComplex(3, ((0, 1), (0, 2), (1, 2)), ((0, 1, 2),))
    d2 = boundary_matrix(cx, 2)
    assert (d2.rows, d2.cols) == (3, 1)
    assert d2.row_bits == (1, 1, 1)  # the triangle's three faces
    with pytest.raises(ValueError):
        boundary_matrix(cx, 3)


def test_composed_boundaries_vanish_on_filled_complexes():
    rng = np.random.default_rng(67)
    for _ in range(40):
        s = PixelSet.from_mask(rng.random((8, 8)) < 0.55)
        cx = complex_from_graph(build_graph(s, Adjacency.EIGHT), fill_triangles=True)
        if not cx.triangles:
            continue
        product = gf2_multiply(boundary_matrix(cx, 1), boundary_matrix(cx, 2))
        assert product.is_zero()


def test_gf2_rank_small_cases():
    assert gf2_rank(BoundaryMatrix(2, 3, (0, 0))) == 0
    assert gf2_rank(BoundaryMatrix(3, 3, (1, 2, 4))) == 3  # identity
    triangle_d1 = boundary_matrix(SimplicialComplex(3, ((0, 1), (0, 2), (1, 2))), 1)
    assert gf2_rank(triangle_d1) == 2  # rows sum to zero over GF(2)
    # rank never mutates its input
    m = BoundaryMatrix(2, 2, (3, 3))
    assert gf2_rank(m) == 1 and m.row_bits == (3, 3)


def test_gf2_multiply_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        gf2_multiply(BoundaryMatrix(1, 2, (1,)), BoundaryMatrix(3, 1, (0, 0, 0)))


def test_betti_of_small_complexes():
    assert betti(SimplicialComplex(0, ())) == BettiProfile(0, 0)
    assert betti(SimplicialComplex(2, ())) == BettiProfile(2, 0)  # two isolated points
    hollow = SimplicialComplex(3, ((0, 1), (0, 2), (1, 2)))
    filled = SimplicialComplex(3, ((0, 1), (0, 2), (1, 2)), ((0, 1, 2),))
    assert betti(hollow) == BettiProfile(1, 1)
    assert betti(filled) == BettiProfile(1, 0)  # the filled face kills the loop


def test_betti_of_the_pixel_ring():
    cx = complex_from_graph(_four_graph(RING))
    assert betti(cx) == BettiProfile(1, 1)
    assert betti_graph_fast(_four_graph(RING)) == BettiProfile(1, 1)


def test_fast_path_on_trees_and_empty_graphs():
    path = _four_graph(PixelSet.from_points(4, 1, [(1, 1), (2, 1), (3, 1)]))
    assert betti_graph_fast(path) == BettiProfile(1, 0)
    empty = _four_graph(PixelSet.from_points(3, 3, []))
    assert betti_graph_fast(empty) == BettiProfile(0, 0)


def test_both_betti_paths_agree_on_random_four_graphs():
    rng = np.random.default_rng(71)
    for _ in range(60):
        h = int(rng.integers(1, 13))
        w = int(rng.integers(1, 13))
        s = PixelSet.from_mask(rng.random((h, w)) < float(rng.uniform(0.3, 0.8)))
        g = _four_graph(s)
        assert betti(complex_from_graph(g)) == betti_graph_fast(g)


def test_b0_matches_component_labeling():
    rng = np.random.default_rng(73)
    for _ in range(30):
        s = PixelSet.from_mask(rng.random((9, 9)) < 0.5)
        assert betti_graph_fast(_four_graph(s)).b0 == connected_components(s, Adjacency.FOUR).count


def test_betti_is_additive_over_disjoint_unions():
    rng = np.random.default_rng(79)
    for _ in range(20):
        left = rng.random((6, 5)) < 0.6
        right = rng.random((6, 5)) < 0.6
        gap = np.zeros((6, 2), dtype=bool)  # keeps the halves non-adjacent
        union = PixelSet.from_mask(np.hstack([left, gap, right]))
        a = betti(complex_from_graph(_four_graph(PixelSet.from_mask(left))))
        b = betti(complex_from_graph(_four_graph(PixelSet.from_mask(right))))
        u = betti(complex_from_graph(_four_graph(union)))
        assert (u.b0, u.b1) == (a.b0 + b.b0, a.b1 + b.b1)


def test_boundary_matrix_column_degrees():
    rng = np.random.default_rng(83)
    s = PixelSet.from_mask(rng.random((7, 7)) < 0.6)
    cx = complex_from_graph(build_graph(s, Adjacency.EIGHT), fill_triangles=True)
    d1 = boundary_matrix(cx, 1)
    for c in range(d1.cols):
        assert sum((bits >> c) & 1 for bits in d1.row_bits) == 2
    d2 = boundary_matrix(cx, 2)
    for c in range(d2.cols):
        assert sum((bits >> c) & 1 for bits in d2.row_bits) == 3
