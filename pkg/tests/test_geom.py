"""Tests for the geometric primitives: predicates, polytopes, Hausdorff distance."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import DimensionMismatch, EmptyInput, NonFiniteCoordinate
from geom import (
    ConvexPolytope, as_point, as_points, convex_hull, directed_distance, hausdorff, incircle,
    incircle_many, is_convex_polygon, orient2d, orient2d_many, polygon_area, polytope_hausdorff,
)


@st.composite
def planar_points(draw, min_points=3, max_points=40):
    """Random planar point sets in [-10, 10]^2"""
    count = draw(st.integers(min_value=min_points, max_value=max_points))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.RandomState(seed)
    return rng.uniform(-10.0, 10.0, (count, 2))


class TestValidation:

    def test_point_dimension_limits(self):
        assert as_point([1.0, 2.0]).shape == (2,)
        with pytest.raises(DimensionMismatch):
            as_point([1.0, 2.0, 3.0, 4.0])
        with pytest.raises(DimensionMismatch):
            as_point([1.0, 2.0], dim=3)

    def test_non_finite_rejected(self):
        with pytest.raises(NonFiniteCoordinate):
            as_point([0.0, np.nan])
        with pytest.raises(NonFiniteCoordinate):
            as_points([[0.0, 1.0], [np.inf, 0.0]])

    def test_empty_point_set(self):
        with pytest.raises(EmptyInput):
            as_points([])

    def test_one_dimensional_column(self):
        assert as_points([1.0, 2.0, 3.0]).shape == (3, 1)


class TestPredicates:

    def test_orientation_signs(self):
        assert orient2d((0, 0), (1, 0), (0, 1)) == 1
        assert orient2d((0, 0), (0, 1), (1, 0)) == -1
        assert orient2d((0, 0), (1, 1), (2, 2)) == 0

    def test_nearly_collinear_is_exact(self):
        # 0.1 + 0.2 != 0.3 in floating point; the exact sign must reflect the stored values
        a, b, c = (0.0, 0.0), (0.1, 0.1), (0.3, 0.1 + 0.2)
        exact = ((Fraction(a[0]) - Fraction(c[0])) * (Fraction(b[1]) - Fraction(c[1]))
                 - (Fraction(a[1]) - Fraction(c[1])) * (Fraction(b[0]) - Fraction(c[0])))
        assert orient2d(a, b, c) == (exact > 0) - (exact < 0)

    def test_incircle_signs(self):
        a, b, c = (1.0, 0.0), (0.0, 1.0), (-1.0, 0.0)
        assert incircle(a, b, c, (0.0, 0.0)) == 1
        assert incircle(a, b, c, (2.0, 0.0)) == -1
        assert incircle(a, b, c, (0.0, -1.0)) == 0

    @given(planar_points())
    @settings(max_examples=50)
    def test_vectorized_matches_scalar(self, pts):
        a, b, c = pts[0], pts[1], pts[2]
        many = orient2d_many(a, b, pts)
        assert many.tolist() == [orient2d(a, b, q) for q in pts]
        circles = incircle_many(a, b, c, pts)
        assert circles.tolist() == [incircle(a, b, c, q) for q in pts]

    @given(planar_points(min_points=3, max_points=3))
    @settings(max_examples=100)
    def test_orientation_antisymmetric(self, pts):
        a, b, c = pts
        assert orient2d(a, b, c) == -orient2d(b, a, c)
        assert orient2d(a, b, c) == orient2d(b, c, a)


class TestPolytopes:

    def test_interval_canonical(self):
        P = ConvexPolytope.interval(2.0, -1.0)
        assert (P.lo, P.hi) == (-1.0, 2.0)
        assert P.diameter() == pytest.approx(3.0)

    def test_unordered_1d_rejected(self):
        with pytest.raises(ValueError):
            ConvexPolytope(vertices=((1.0,), (0.0,)))

    def test_square_hull_drops_interior_and_collinear(self):
        pts = [[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5], [0.5, 0.0]]
        hull = convex_hull(pts)
        assert len(hull.vertices) == 4
        assert polygon_area(hull.vertices) == pytest.approx(1.0)

    @given(planar_points())
    @settings(max_examples=50)
    def test_hull_idempotent(self, pts):
        hull = convex_hull(pts)
        again = convex_hull(hull.vertex_array)
        assert again.vertices == hull.vertices

    @given(planar_points())
    @settings(max_examples=50)
    def test_hull_contains_input(self, pts):
        hull = convex_hull(pts)
        assert all(hull.contains(p, tol=1e-9) for p in pts)

    def test_distance_to_square(self):
        square = convex_hull([[0, 0], [1, 0], [1, 1], [0, 1]])
        assert square.distance_to([0.5, 0.5]) == 0.0
        assert square.distance_to([2.0, 0.5]) == pytest.approx(1.0)
        assert square.distance_to([2.0, 2.0]) == pytest.approx(np.sqrt(2.0))

    def test_minkowski_sum_of_intervals(self):
        P = ConvexPolytope.interval(-1.0, 1.0).minkowski_sum(ConvexPolytope.interval(0.0, 2.0))
        assert (P.lo, P.hi) == (-1.0, 3.0)

    def test_sample_covers_polytope(self):
        tri = convex_hull([[0, 0], [1, 0], [0, 1]])
        samples = tri.sample(0.05)
        assert all(tri.contains(p, tol=1e-12) for p in samples)
        near = np.array([[0.2, 0.2], [0.0, 0.5], [0.49, 0.49]])
        assert directed_distance(near, samples) <= 0.05

    def test_polytope_hausdorff_intervals(self):
        d = polytope_hausdorff(ConvexPolytope.interval(0.0, 1.0), ConvexPolytope.interval(0.0, 3.0))
        assert d == pytest.approx(2.0)


class TestHausdorff:

    @given(planar_points(), planar_points(), planar_points())
    @settings(max_examples=50)
    def test_triangle_inequality(self, A, B, C):
        assert hausdorff(A, C) <= hausdorff(A, B) + hausdorff(B, C) + 1e-9

    @given(planar_points())
    @settings(max_examples=30)
    def test_zero_on_itself(self, A):
        assert hausdorff(A, A) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            hausdorff([[0.0, 0.0]], [[0.0]])


def test_convexity_certificate():
    assert is_convex_polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert not is_convex_polygon([[0, 0], [2, 0], [1, 0.5], [2, 2], [0, 2]])
    assert not is_convex_polygon([[0, 0], [1, 0], [2, 0]])
    assert polygon_area([[0, 0], [0, 1], [1, 1], [1, 0]]) == pytest.approx(-1.0)
