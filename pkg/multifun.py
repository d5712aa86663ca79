#!/usr/bin/env python3
"""
Sampled multifunction graphs and their two convergence modes

A graph is a SampledSet in the product space R^{p+q}. Graphical
convergence reuses the Kuratowski defects of the sets module; pointwise
convergence compares the slice of a graph over a point with a polytope.
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial import cKDTree

from errors import DimensionMismatch, EmptySlice
from geom import ConvexPolytope, as_point, as_points
from sets import DefectPair, GridWindow, SampledSet, kuratowski_defects
from subdiff import PLFunction1D, pl_subdifferential

logger = logging.getLogger(__name__)

# Extra room around the value band so that shrinking the product window
# for defect evaluation never cuts off the extreme values
_TARGET_PAD = 0.5


class MultifunctionGraph(BaseModel):
    """Finite sample of the graph {(x, y) : y in F(x)}"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pairs: np.ndarray = Field(..., description="(N, p + q) rows (x..., y...)")
    source_dim: int = Field(..., ge=1, le=3, description="p")
    target_dim: int = Field(..., ge=1, le=2, description="q")
    eps: float = Field(..., ge=0, description="Certification radius of the graph sample")
    window: GridWindow = Field(..., description="Window on the product space")
    truncated: bool = Field(False, description="Values were clipped to the target band")
    label: str = ""

    @field_validator("pairs", mode="before")
    @classmethod
    def check_pairs(cls, v):
        array = as_points(v).copy()
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_dims(self):
        width = self.source_dim + self.target_dim
        if self.pairs.shape[1] != width or self.window.dim != width:
            raise ValueError(f"pairs of width {self.pairs.shape[1]} and a {self.window.dim}-D window for p+q={width}")
        return self

    @property
    def sources(self) -> np.ndarray:
        return self.pairs[:, :self.source_dim]

    @property
    def targets(self) -> np.ndarray:
        return self.pairs[:, self.source_dim:]

    def as_sampled_set(self) -> SampledSet:
        return SampledSet(points=self.pairs, eps=self.eps, window=self.window, label=self.label)


def graph_window(source_lo: Sequence[float], source_hi: Sequence[float], band: float, h: float,
                 target_dim: int = 1) -> GridWindow:
    """Product window: the source box times the padded value band [-band, band]^q"""
    reach = band + _TARGET_PAD
    return GridWindow(
        lo=tuple(float(v) for v in source_lo) + (-reach,) * target_dim,
        hi=tuple(float(v) for v in source_hi) + (reach,) * target_dim,
        h=h,
    )


def _clip_interval(lo: float, hi: float, band: Optional[float]) -> Tuple[float, float, bool]:
    if band is None or (lo >= -band and hi <= band):
        return lo, hi, False
    return max(lo, -band), min(hi, band), True


def _span(a: float, b: float, step: float) -> np.ndarray:
    count = max(1, int(np.ceil((b - a) / step))) if b > a else 0
    return np.linspace(a, b, count + 1)


def subdiff_graph_of_pl(f: PLFunction1D, eps: float, band: Optional[float] = None,
                        label: str = "") -> MultifunctionGraph:
    """Graph of x -> subdifferential of f: horizontal slope segments plus vertical segments at breakpoints"""
    if eps <= 0:
        raise ValueError("eps must be positive")
    xs, slopes = f.breakpoints, f.slopes
    extent = max(1.0, float(np.max(np.abs(slopes)))) if band is None else band
    truncated = False
    pieces = []
    for i, s in enumerate(slopes):
        if band is not None and abs(s) > band:
            truncated = True
            continue
        seg = _span(xs[i], xs[i + 1], eps)
        pieces.append(np.column_stack([seg, np.full_like(seg, s)]))
    for k in range(1, len(xs) - 1):
        lo, hi, clipped = _clip_interval(min(slopes[k - 1], slopes[k]), max(slopes[k - 1], slopes[k]), band)
        truncated |= clipped
        ys = _span(lo, hi, eps)
        pieces.append(np.column_stack([np.full_like(ys, xs[k]), ys]))
    window = graph_window((xs[0],), (xs[-1],), extent, eps)
    return MultifunctionGraph(
        pairs=np.vstack(pieces), source_dim=1, target_dim=1, eps=eps,
        window=window, truncated=truncated, label=label or "subdiff graph",
    )


def graph_from_values(sources, values: Sequence[ConvexPolytope], eps: float, window: GridWindow,
                      band: Optional[float] = None, label: str = "") -> MultifunctionGraph:
    """Graph from precomputed polytope values, each densely sampled at spacing eps"""
    sources = as_points(sources)
    p = sources.shape[1]
    q = window.dim - p
    if len(values) != len(sources):
        raise ValueError(f"{len(values)} values for {len(sources)} sources")
    rows = []
    truncated = False
    for x, V in zip(sources, values):
        if V.dim != q:
            raise DimensionMismatch(f"values of dimension {V.dim}, expected {q}")
        ys = V.sample(eps) if V.diameter() > 0 else V.vertex_array[:1]
        if band is not None:
            keep = np.all(np.abs(ys) <= band, axis=1)
            truncated |= not bool(np.all(keep))
            ys = ys[keep]
        if len(ys):
            rows.append(np.hstack([np.repeat(x[None, :], len(ys), axis=0), ys]))
    if not rows:
        raise ValueError("every value fell outside the band")
    return MultifunctionGraph(
        pairs=np.vstack(rows), source_dim=p, target_dim=q, eps=eps,
        window=window, truncated=truncated, label=label,
    )


def graph_from_boxes(boxes: Iterable[Tuple[Tuple[float, float], Tuple[float, float]]], eps: float,
                     window: GridWindow, band: Optional[float] = None, label: str = "") -> MultifunctionGraph:
    """
    Graph given as a union of (x-range, y-range) boxes in R x R

    Infinite y-ranges are cut at the band (default: the window's target
    half-width without padding) and the graph is flagged as truncated.
    """
    if window.dim != 2:
        raise DimensionMismatch("box graphs live in R x R")
    band = window.hi[1] - _TARGET_PAD if band is None else band
    truncated = False
    rows = []
    for (xlo, xhi), (ylo, yhi) in boxes:
        ylo_c, yhi_c, clipped = _clip_interval(ylo, yhi, band)
        truncated |= clipped
        gx, gy = np.meshgrid(_span(xlo, xhi, eps), _span(ylo_c, yhi_c, eps), indexing="ij")
        rows.append(np.column_stack([gx.ravel(), gy.ravel()]))
    return MultifunctionGraph(
        pairs=np.vstack(rows), source_dim=1, target_dim=1, eps=eps,
        window=window, truncated=truncated, label=label or "box graph",
    )


def graphical_defects(G_n: MultifunctionGraph, G_lim: MultifunctionGraph,
                      margin: Optional[float] = None) -> DefectPair:
    """Kuratowski defects of the two graphs as subsets of R^{p+q}"""
    if G_n.source_dim != G_lim.source_dim or G_n.target_dim != G_lim.target_dim:
        raise DimensionMismatch(
            f"graphs over ({G_n.source_dim}, {G_n.target_dim}) and ({G_lim.source_dim}, {G_lim.target_dim})"
        )
    return kuratowski_defects(G_n.as_sampled_set(), G_lim.as_sampled_set(), margin)


def graph_slice(G: MultifunctionGraph, x, tol: Optional[float] = None) -> np.ndarray:
    """Targets of the pairs whose source lies within tol of x"""
    point = as_point(x, G.source_dim)
    tol = 2.0 * (G.eps + G.window.h) if tol is None else tol
    near = np.linalg.norm(G.sources - point, axis=1) <= tol
    if not np.any(near):
        raise EmptySlice(f"no graph pairs within {tol} of {point.tolist()}")
    return G.targets[near]


def pointwise_defect(G_n: MultifunctionGraph, x, V_lim: ConvexPolytope,
                     tol: Optional[float] = None) -> DefectPair:
    """Kuratowski defects of the slice of G_n over x against the polytope V_lim"""
    if V_lim.dim != G_n.target_dim:
        raise DimensionMismatch(f"{V_lim.dim}-D value against a graph with q={G_n.target_dim}")
    slice_ = graph_slice(G_n, x, tol)
    step = G_n.eps if G_n.eps > 0 else 1e-3
    limit_samples = V_lim.sample(step) if V_lim.diameter() > 0 else V_lim.vertex_array
    lower = float(np.max(cKDTree(slice_).query(limit_samples)[0]))
    upper = max(V_lim.distance_to(y) for y in slice_)
    return DefectPair(lower_defect=lower, upper_defect=float(upper))


def outer_semicontinuity_violations(f: PLFunction1D, offset: Optional[float] = None) -> List[float]:
    """
    Breakpoints where nearby values escape the value at the breakpoint

    For every interior breakpoint x_i the subdifferentials at x_i +- offset
    must lie inside the subdifferential at x_i.
    """
    xs = f.breakpoints
    gaps = np.diff(xs)
    offset = float(np.min(gaps)) / 4.0 if offset is None else offset
    violations = []
    for k in range(1, len(xs) - 1):
        at = pl_subdifferential(f, xs[k])
        for x in (xs[k] - offset, xs[k] + offset):
            if f.in_domain(x) and not at.includes(pl_subdifferential(f, x)):
                violations.append(xs[k])
                break
    return violations
