"""Tests for windows, sampled sets, Kuratowski defects and the set corpus."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import (
    DimensionMismatch, EmptyAfterShrink, InfeasibleFidelity, UnknownFamily, WindowMismatch,
)
from geom import polygon_area
from sets import (
    DefectPair, Family, GridWindow, SampledSet, converges, dist_deviation, diverges, eval_dist,
    family_dimensions, has_limit, hull_boundary_sample, kuratowski_defects, limit_family, make_family,
    regular_polygon, sample_sequence,
)

W1 = GridWindow.cube(1, -1.0, 1.0, 1e-2)
W2 = GridWindow.cube(2, -1.5, 1.5, 5e-2)


@st.composite
def sampled_sets(draw, min_points=1, max_points=60):
    """Random samples inside the unit square window"""
    count = draw(st.integers(min_value=min_points, max_value=max_points))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    rng = np.random.RandomState(seed)
    window = GridWindow.cube(2, -1.0, 1.0, 0.1)
    return SampledSet(points=rng.uniform(-1.0, 1.0, (count, 2)), eps=0.0, window=window)


class TestGridWindow:

    def test_rejects_inverted_corners(self):
        with pytest.raises(ValueError):
            GridWindow(lo=(1.0,), hi=(0.0,), h=0.1)

    def test_rejects_step_larger_than_side(self):
        with pytest.raises(ValueError):
            GridWindow.cube(2, 0.0, 1.0, 2.0)

    def test_nodes_include_both_corners(self):
        nodes = GridWindow.cube(1, 0.0, 1.0, 0.3).nodes()[:, 0]
        assert nodes[0] == 0.0
        assert nodes[-1] == 1.0
        assert np.all(np.diff(nodes) > 0)

    def test_shrink_to_nothing(self):
        with pytest.raises(EmptyAfterShrink):
            W1.shrink(1.0)

    def test_intersection_requires_overlap(self):
        with pytest.raises(WindowMismatch):
            GridWindow.cube(1, 0.0, 1.0, 0.1).intersect(GridWindow.cube(1, 2.0, 3.0, 0.1))

    def test_product_dimension(self):
        assert W1.product(W1).dim == 2


class TestSampledSet:

    def test_points_are_read_only(self):
        S = SampledSet(points=[[0.0, 0.0]], eps=0.0, window=W2)
        with pytest.raises(ValueError):
            S.points[0, 0] = 1.0

    def test_dimension_must_match_window(self):
        with pytest.raises(ValueError):
            SampledSet(points=[[0.0, 0.0]], eps=0.0, window=W1)

    def test_far_points_rejected(self):
        with pytest.raises(ValueError):
            SampledSet(points=[[100.0]], eps=0.0, window=W1)

    def test_eval_dist(self):
        S = SampledSet(points=[[0.0, 0.0], [1.0, 0.0]], eps=0.0, window=W2)
        assert eval_dist(S, [0.0, 1.0]) == pytest.approx(1.0)
        assert eval_dist(S, [0.75, 0.0]) == pytest.approx(0.25)


class TestDefects:

    @given(sampled_sets())
    @settings(max_examples=50)
    def test_zero_against_itself(self, S):
        d = kuratowski_defects(S, S, margin=0.0)
        assert d.lower_defect == 0.0
        assert d.upper_defect == 0.0

    def test_two_points_to_origin(self):
        S_n = make_family("two-points", 4, W1, 1e-3)
        limit = limit_family("two-points", W1, 1e-3)
        d = kuratowski_defects(S_n, limit)
        assert d.lower_defect == pytest.approx(0.25)
        assert d.upper_defect == pytest.approx(0.25)

    def test_margin_too_large(self):
        S = make_family("origin", 1, W1, 1e-3)
        with pytest.raises(EmptyAfterShrink):
            kuratowski_defects(S, S, margin=1.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kuratowski_defects(make_family("origin", 1, W1, 1e-3), make_family("origin", 1, W2, 1e-3))

    def test_paper_family_defects_shrink_like_one_over_n(self):
        n_list = [5, 10, 20, 40, 80]
        limit = limit_family(Family.PAPER_X_N, W1, 1e-3)
        series = [kuratowski_defects(S, limit) for S in sample_sequence("paper-x-n", n_list, W1, 1e-3)]
        for n, d in zip(n_list, series):
            assert d.lower_defect == pytest.approx(1.0 / n, abs=2e-3)
            assert d.upper_defect <= 2e-3
        assert converges(series, 0.05, n_list)
        assert not diverges(series, 0.05)

    def test_ngon_regions_approach_disc(self):
        eps = 0.02
        d = kuratowski_defects(make_family("ngon", 32, W2, eps), limit_family("ngon", W2, eps))
        assert d.value <= 1.0 - np.cos(np.pi / 32) + 2 * eps

    def test_annulus_collapses_inner_circle(self):
        d = kuratowski_defects(make_family("annulus", 20, W2, 1e-3), limit_family("annulus", W2, 1e-3))
        assert d.value == pytest.approx(1.0 / 20, abs=5e-3)

    def test_deviation_of_distance_functions(self):
        grid = GridWindow.cube(1, -0.5, 0.5, 0.05)
        S1 = make_family("paper-x-n", 10, W1, 1e-3)
        S2 = limit_family("paper-x-n", W1, 1e-3)
        assert dist_deviation(S1, S2, grid) == pytest.approx(0.1, abs=2e-3)
        with pytest.raises(WindowMismatch):
            dist_deviation(S1, S2, GridWindow.cube(1, -3.0, 3.0, 0.1))


class TestCriteria:

    def test_converging_scalar_series(self):
        assert converges([0.4, 0.2, 0.1, 0.04, 0.01], 0.05)

    def test_rising_tail_does_not_converge(self):
        assert not converges([0.04, 0.01, 0.0, 0.0, 0.03], 0.05)

    def test_stuck_series_diverges(self):
        series = [DefectPair(lower_defect=0.0, upper_defect=1.0)] * 6
        assert diverges(series, 0.05)
        assert not converges(series, 0.05)


class TestCorpus:

    def test_parse_names(self):
        assert Family.parse("paper-x-n") is Family.PAPER_X_N
        assert Family.parse("PAPER_X_N") is Family.PAPER_X_N
        with pytest.raises(UnknownFamily):
            Family.parse("no-such-family")

    def test_dimension_checked(self):
        with pytest.raises(DimensionMismatch):
            make_family("paper-x-n", 3, W2, 1e-3)
        assert family_dimensions("paper-x-n") == (1,)
        assert family_dimensions("ngon") == (2,)

    def test_fidelity_limits(self):
        with pytest.raises(InfeasibleFidelity):
            make_family("circle", 1, W2, 1e-14)

    def test_limits_registered(self):
        assert has_limit("ngon")
        assert not has_limit("half-disc")
        with pytest.raises(UnknownFamily):
            limit_family("half-disc", W2, 0.02)

    def test_regular_polygon_counterclockwise(self):
        vertices = regular_polygon(12)
        assert polygon_area(vertices) > 0
        assert np.allclose(np.hypot(vertices[:, 0], vertices[:, 1]), 1.0)

    def test_hull_boundary_of_ngon(self):
        S = make_family("ngon-boundary", 6, W2, 0.01)
        boundary = hull_boundary_sample(S)
        assert kuratowski_defects(boundary, S, margin=0.0).value <= 0.02

    def test_certified_circle_sample(self):
        S = make_family("circle", 1, W2, 1e-2)
        radii = np.hypot(S.points[:, 0], S.points[:, 1])
        assert np.allclose(radii, 1.0)
        theta = np.sort(np.arctan2(S.points[:, 1], S.points[:, 0]))
        assert np.max(np.diff(theta)) <= 1e-2 + 1e-12
