"""Tests for certified fiber sampling and the function families."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from errors import EmptyInput, UnknownFamily
from level_sets import (
    cubic_fiber_function, fiber_zero_branches, fiber_zero_set, get_level_family, gradient_lower_bound,
    jacobian_fd, operator_norm_deviation, sample_fiber, sample_level_set, solve_level_points,
)
from sets import GridWindow

EPS = 1e-3


def test_quadratic_fiber_is_two_points():
    window = GridWindow.cube(1, -2.0, 2.0, 0.01)
    S = sample_level_set(lambda z: z[..., 0] ** 2 - 1.0, 0.0, window, EPS)
    xs = S.points[:, 0]
    assert np.all(np.abs(np.abs(xs) - 1.0) <= EPS)
    assert np.any(xs < 0) and np.any(xs > 0)


def test_circle_fiber_radii():
    window = GridWindow.cube(2, -2.0, 2.0, 0.05)
    S = sample_level_set(lambda z: z[..., 0] ** 2 + z[..., 1] ** 2, 1.0, window, 0.02)
    radii = np.hypot(S.points[:, 0], S.points[:, 1])
    assert np.all(np.abs(radii - 1.0) <= 0.02)
    theta = np.sort(np.arctan2(S.points[:, 1], S.points[:, 0]))
    assert np.max(np.diff(theta)) <= 0.05


def test_empty_fiber_raises():
    window = GridWindow.cube(1, -1.0, 1.0, 0.1)
    with pytest.raises(EmptyInput):
        sample_level_set(lambda z: z[..., 0] ** 2 + 1.0, 0.0, window, EPS)


def test_tangential_zero_needs_touch_tolerance():
    window = GridWindow.cube(1, -1.0, 1.0, 0.1)
    S = sample_level_set(lambda z: z[..., 0] ** 2, 0.0, window, EPS, touch_tol=1e-6)
    assert np.min(np.abs(S.points[:, 0])) <= EPS


@given(st.floats(min_value=0.5, max_value=5.0), st.floats(min_value=-0.9, max_value=0.9))
@settings(max_examples=50, deadline=None)
def test_linear_root_located(slope, root):
    window = GridWindow.cube(1, -1.0, 1.0, 0.1)
    S = sample_level_set(lambda z: slope * (z[..., 0] - root), 0.0, window, EPS)
    assert np.all(np.abs(S.points[:, 0] - root) <= EPS)


def test_isolated_points_of_planar_map():
    fam = get_level_family("parabola-pair-2d")
    window = GridWindow.from_corners(fam.window, 0.1)
    S = solve_level_points(fam.limit, fam.level, window, EPS)
    pts = S.points[np.argsort(S.points[:, 0])]
    assert len(pts) == 2
    np.testing.assert_allclose(pts, [[-0.5, 0.25], [0.5, 0.25]], atol=1e-8)


def test_dispatch_on_target_dimension():
    fam = get_level_family("quadratic-1d")
    window = GridWindow.from_corners(fam.window, 0.01)
    S = sample_fiber(fam.at(4), fam.level, window, EPS, target_dim=fam.target_dim)
    expected = np.sqrt(1.0 - 1.0 / 4)
    assert np.all(np.abs(np.abs(S.points[:, 0]) - expected) <= EPS)


def test_gradient_bound_and_jacobians():
    points = np.array([[-1.0], [1.0]])
    assert gradient_lower_bound(lambda z: z[..., 0] ** 2 - 1.0, points, 1e-4) == pytest.approx(2.0)

    fam = get_level_family("parabola-pair-2d")
    pts = np.array([[0.5, 0.25], [-0.5, 0.25]])
    J = jacobian_fd(fam.limit, pts, 1e-5)
    assert J.shape == (2, 2, 2)
    np.testing.assert_allclose(J[0], [[1.0, -1.0], [0.0, 1.0]], atol=1e-6)
    J_n = jacobian_fd(fam.at(10), pts, 1e-5)
    assert operator_norm_deviation(J, J_n) == pytest.approx(0.0, abs=1e-6)


def test_cubic_zero_set_branches():
    window = GridWindow.cube(2, -2.0, 2.0, 0.05)
    branches = fiber_zero_branches(window, 0.01)
    assert set(branches) == {"vertical", "diagonal_negative", "diagonal_positive"}
    for points in branches.values():
        assert np.allclose(cubic_fiber_function(points), 0.0)
    zero = fiber_zero_set(window, 0.01)
    assert np.any(np.all(zero == 0.0, axis=1))


def test_family_lookup():
    assert get_level_family("QUADRATIC_1D").name == "quadratic-1d"
    with pytest.raises(UnknownFamily):
        get_level_family("cosine")
