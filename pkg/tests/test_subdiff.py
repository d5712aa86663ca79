"""Tests for PL subdifferential calculus, projections and the PL corpus."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import OutOfDomain, UnknownFamily
from geom import ConvexPolytope, polytope_hausdorff
from harness import dist_counterexample_boxes
from sets import GridWindow, SampledSet
from subdiff import (
    PLFamily, PLFunction1D, abs_function, build_pl_family, clarke_dist, clarke_sq_dist,
    dist_subdifferential_table, lebourg_witness, medial_axis_flag, pl_family_spec, pl_subdifferential,
    pl_subdifferential_exact, projection_set, sawtooth, sq_dist_subdifferential_table,
)


@st.composite
def pl_functions(draw):
    """PL functions on [-1, 1] with breakpoints on the dyadic grid k / 8 and integer values"""
    inner = draw(st.sets(st.integers(min_value=-7, max_value=7), max_size=8))
    ks = [-8] + sorted(inner) + [8]
    values = draw(st.lists(st.integers(min_value=-5, max_value=5), min_size=len(ks), max_size=len(ks)))
    return PLFunction1D.from_points([k / 8 for k in ks], [float(v) for v in values])


def kink_and_mid_points(*functions):
    """Breakpoints of every function plus the midpoints between them"""
    xs = np.unique(np.concatenate([f.breakpoints for f in functions]))
    return np.concatenate([xs, 0.5 * (xs[:-1] + xs[1:])])


class TestPLFunction:

    def test_rejects_unsorted_breakpoints(self):
        with pytest.raises(ValueError):
            PLFunction1D.from_points([0.0, 0.0, 1.0], [0.0, 1.0, 2.0])

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            PLFunction1D.from_points([0.0, 1.0], [0.0])

    def test_evaluate_outside_domain(self):
        with pytest.raises(OutOfDomain):
            abs_function().evaluate(1.5)

    def test_abs_subdifferential(self):
        f = abs_function()
        at_kink = pl_subdifferential(f, 0.0)
        assert (at_kink.lo, at_kink.hi) == (-1.0, 1.0)
        assert pl_subdifferential(f, 0.5).vertices == ((1.0,), (1.0,))
        assert pl_subdifferential(f, -1.0).vertices == ((-1.0,), (-1.0,))
        assert pl_subdifferential_exact(f, 0) == (Fraction(-1), Fraction(1))

    def test_sawtooth_shape(self):
        f = sawtooth(8)
        assert f.lipschitz == pytest.approx(1.0)
        assert f.sup_distance(PLFunction1D.from_points([-1.0, 1.0], [0.0, 0.0])) == pytest.approx(1.0 / 8)

    @given(pl_functions(), pl_functions())
    @settings(max_examples=100)
    def test_sum_rule(self, f, g):
        h = f.plus(g)
        for x in kink_and_mid_points(f, g):
            bound = pl_subdifferential(f, x).minkowski_sum(pl_subdifferential(g, x))
            assert bound.includes(pl_subdifferential(h, x), tol=1e-9)

    @given(pl_functions(), st.floats(min_value=-4.0, max_value=4.0))
    @settings(max_examples=100)
    def test_scaling(self, f, t):
        for x in kink_and_mid_points(f):
            scaled = pl_subdifferential(f.scaled(t), x)
            expected = pl_subdifferential(f, x).scaled(t)
            assert polytope_hausdorff(scaled, expected) <= 1e-9

    @given(pl_functions(), st.integers(min_value=-8, max_value=7), st.integers(min_value=1, max_value=16))
    @settings(max_examples=100)
    def test_lebourg_mean_value(self, f, start, length):
        a = start / 8
        b = min(1.0, a + length / 16)
        c = lebourg_witness(f, a, b)
        assert a < c < b
        mean = (f.exact_value(Fraction(b)) - f.exact_value(Fraction(a))) / (Fraction(b) - Fraction(a))
        lo, hi = pl_subdifferential_exact(f, c)
        assert lo <= mean <= hi

    def test_lebourg_needs_interval(self):
        with pytest.raises(ValueError):
            lebourg_witness(abs_function(), 0.5, 0.5)


class TestProjections:

    @pytest.fixture
    def two_points(self):
        return SampledSet(points=[[-1.0], [1.0]], eps=0.0, window=GridWindow.cube(1, -2.0, 2.0, 0.1))

    def test_projection_of_midpoint(self, two_points):
        P = projection_set(two_points, [0.0], tol=1e-9)
        assert len(P.candidates) == 2
        assert P.radius == pytest.approx(1.0)
        assert P.diameter == pytest.approx(2.0)
        assert medial_axis_flag(two_points, [0.0], tol=1e-9)
        assert not medial_axis_flag(two_points, [0.5], tol=1e-9)

    def test_sq_dist_subdifferential(self, two_points):
        at_mid = clarke_sq_dist(two_points, [0.0], tol=1e-9)
        assert (at_mid.lo, at_mid.hi) == (-2.0, 2.0)
        off = clarke_sq_dist(two_points, [0.5], tol=1e-9)
        assert off.vertices == ((-1.0,), (-1.0,))

    def test_dist_subdifferential(self, two_points):
        at_mid = clarke_dist(two_points, [0.0], tol=1e-9)
        assert (at_mid.lo, at_mid.hi) == (-1.0, 1.0)
        with pytest.raises(ValueError):
            clarke_dist(two_points, [1.0], tol=1e-9)

    def test_planar_sq_dist_on_circle_centre(self):
        theta = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)
        S = SampledSet(points=np.column_stack([np.cos(theta), np.sin(theta)]), eps=0.0,
                       window=GridWindow.cube(2, -1.5, 1.5, 0.1))
        V = clarke_sq_dist(S, [0.0, 0.0], tol=1e-9)
        assert len(V.vertices) == 64
        assert V.contains([0.0, 0.0])
        assert V.diameter() == pytest.approx(4.0)


class TestTables:

    def test_dist_table(self):
        assert dist_subdifferential_table(10, 0.0) == (-1.0, 1.0)
        assert dist_subdifferential_table(10, 0.05) == (-1.0, -1.0)
        assert dist_subdifferential_table(10, -0.05) == (1.0, 1.0)
        assert dist_subdifferential_table(10, 0.5) == (0.0, 0.0)
        assert dist_subdifferential_table(10, -0.5) == (0.0, 0.0)

    def test_dist_table_kinks_at_the_set_boundary(self):
        assert dist_subdifferential_table(10, 0.1) == (-1.0, 0.0)
        assert dist_subdifferential_table(10, -0.1) == (0.0, 1.0)
        assert dist_subdifferential_table(4, 0.25) == (-1.0, 0.0)

    def test_dist_table_matches_counterexample_boxes(self):
        n = 8
        for x in (-1.0, -0.5, -1 / n, -1 / (2 * n), 0.0, 1 / (2 * n), 1 / n, 0.5, 1.0):
            covering = [yr for xr, yr in dist_counterexample_boxes(n) if xr[0] <= x <= xr[1]]
            lo = min(y for y, _ in covering)
            hi = max(y for _, y in covering)
            assert dist_subdifferential_table(n, x) == (lo, hi)

    def test_sq_dist_table(self):
        assert sq_dist_subdifferential_table(10, 0.0) == pytest.approx((-0.2, 0.2))
        assert sq_dist_subdifferential_table(10, 0.05) == pytest.approx((-0.1, -0.1))
        assert sq_dist_subdifferential_table(10, 0.3) == (0.0, 0.0)


class TestFamilies:

    def test_parse(self):
        assert PLFamily.parse("SAWTOOTH") is PLFamily.SAWTOOTH
        with pytest.raises(UnknownFamily):
            PLFamily.parse("zigzag")

    def test_spike_collapses_small_n(self):
        f = build_pl_family("spike", 1)
        assert f.breakpoints == (-1.0, 0.0, 1.0)

    def test_spike_slopes_grow(self):
        assert build_pl_family("spike", 20).lipschitz == pytest.approx(20.0)

    def test_abs_shrink_converges_uniformly(self):
        f = build_pl_family("abs-shrink", 10)
        assert f.sup_distance(abs_function()) == pytest.approx(0.1)

    def test_spec_flags(self):
        assert pl_family_spec("abs-shrink").ae_univalued
        assert pl_family_spec("abs-shrink").bounded
        assert not pl_family_spec("sawtooth").ae_univalued
        assert not pl_family_spec("spike").bounded
        assert pl_family_spec("single-tooth").limit_slice(0.0) == (-1.0, 1.0)
        assert pl_family_spec("single-tooth").limit_slice(0.5) == (0.0, 0.0)

    def test_index_must_be_positive(self):
        with pytest.raises(ValueError):
            build_pl_family("sawtooth", 0)


def test_polytope_interval_helper():
    assert ConvexPolytope.interval(1.0, 1.0).is_singleton
