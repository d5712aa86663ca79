"""Tests for sampled multifunction graphs and their convergence measures."""

import numpy as np
import pytest

from errors import DimensionMismatch, EmptySlice
from geom import ConvexPolytope
from multifun import (
    MultifunctionGraph, graph_from_boxes, graph_from_values, graph_slice, graph_window, graphical_defects,
    outer_semicontinuity_violations, pointwise_defect, subdiff_graph_of_pl,
)
from sets import GridWindow
from subdiff import abs_function, build_pl_family, pl_family_spec, sawtooth

EPS = 0.01


@pytest.fixture
def abs_shrink_graph():
    return subdiff_graph_of_pl(build_pl_family("abs-shrink", 10), EPS)


def test_graph_window_pads_value_band():
    window = graph_window((-1.0,), (1.0,), 2.0, 0.1)
    assert window.lo == (-1.0, -2.5)
    assert window.hi == (1.0, 2.5)


def test_pl_graph_has_slopes_and_vertical_segment(abs_shrink_graph):
    G = abs_shrink_graph
    assert G.source_dim == 1 and G.target_dim == 1
    assert not G.truncated
    on_kink = G.targets[G.sources[:, 0] == 0.0][:, 0]
    assert on_kink.min() == pytest.approx(-0.9)
    assert on_kink.max() == pytest.approx(0.9)
    assert set(np.round(G.targets[G.sources[:, 0] > 0.1][:, 0], 12)) == {0.9}


def test_graphical_defects_against_limit_boxes(abs_shrink_graph):
    G_n = abs_shrink_graph
    G_lim = graph_from_boxes(pl_family_spec("abs-shrink").limit_boxes, EPS, G_n.window)
    d = graphical_defects(G_n, G_lim)
    assert d.value == pytest.approx(0.1, abs=2 * EPS)


def test_slice_and_pointwise_defect(abs_shrink_graph):
    G = abs_shrink_graph
    slice_ = graph_slice(G, [0.0])
    assert slice_.min() == pytest.approx(-0.9)
    d = pointwise_defect(G, [0.0], ConvexPolytope.interval(-0.9, 0.9))
    assert d.value <= EPS
    far = pointwise_defect(G, [0.0], ConvexPolytope.interval(-2.0, 2.0))
    assert far.lower_defect == pytest.approx(1.1, abs=EPS)
    with pytest.raises(EmptySlice):
        graph_slice(G, [5.0])
    with pytest.raises(DimensionMismatch):
        pointwise_defect(G, [0.0], ConvexPolytope.singleton([0.0, 0.0]))


def test_band_truncates_steep_slopes():
    G = subdiff_graph_of_pl(build_pl_family("spike", 20), 0.05, band=5.0)
    assert G.truncated
    assert np.all(np.abs(G.targets) <= 5.0)


def test_box_graph_clips_unbounded_ranges():
    window = graph_window((-1.0,), (1.0,), 3.0, EPS)
    G = graph_from_boxes(pl_family_spec("spike").limit_boxes, EPS, window)
    assert G.truncated
    assert G.targets.max() == pytest.approx(3.0)


def test_values_graph():
    window = graph_window((-1.0,), (1.0,), 1.5, 0.1)
    sources = GridWindow.cube(1, -1.0, 1.0, 0.1).nodes()
    values = [ConvexPolytope.interval(x[0] - 0.1, x[0] + 0.1) for x in sources]
    G = graph_from_values(sources, values, 0.02, window)
    assert np.all(np.abs(G.targets[:, 0] - G.sources[:, 0]) <= 0.1 + 1e-12)
    with pytest.raises(ValueError):
        graph_from_values(sources, [ConvexPolytope.interval(0.0, 1.0)], 0.02, window)
    with pytest.raises(DimensionMismatch):
        graph_from_values(sources[:1], [ConvexPolytope.singleton([0.0, 0.0])], 0.02, window)


def test_values_outside_band_are_dropped():
    window = graph_window((-1.0,), (1.0,), 1.0, 0.1)
    sources = np.array([[0.0], [0.5]])
    G = graph_from_values(sources, [ConvexPolytope.interval(0.0, 0.5), ConvexPolytope.interval(4.0, 5.0)],
                          0.1, window, band=1.0)
    assert G.truncated
    assert np.all(G.sources[:, 0] == 0.0)


def test_pairs_must_match_dimensions():
    with pytest.raises(ValueError):
        MultifunctionGraph(pairs=[[0.0, 0.0, 0.0]], source_dim=1, target_dim=1, eps=0.1,
                           window=graph_window((-1.0,), (1.0,), 1.0, 0.1))


def test_pl_subdifferentials_are_outer_semicontinuous():
    assert outer_semicontinuity_violations(abs_function()) == []
    assert outer_semicontinuity_violations(sawtooth(6)) == []
