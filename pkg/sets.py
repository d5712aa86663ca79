#!/usr/bin/env python3
"""
Closed subsets of R^p as certified finite samples

A SampledSet carries points, a fidelity eps and the window on which the
sample is valid. Kuratowski convergence is measured two ways: through the
deviation of distance functions on a grid, and through the pair of
liminf / limsup inclusion defects. The corpus of analytic families used by
the verification suites is built here too.
"""

import logging
from enum import Enum
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator
from scipy.spatial import cKDTree

import config
from errors import (
    DimensionMismatch,
    EmptyAfterShrink,
    EmptyInput,
    InfeasibleFidelity,
    UnknownFamily,
    WindowMismatch,
)
from geom import as_point, as_points, convex_hull

logger = logging.getLogger(__name__)

# Relative slack for window containment tests
_WINDOW_SLACK = 1e-9


class GridWindow(BaseModel):
    """Axis-aligned box with a grid step; the compact region where convergence is measured"""
    model_config = ConfigDict(frozen=True)

    lo: Tuple[float, ...] = Field(..., description="Lower corner")
    hi: Tuple[float, ...] = Field(..., description="Upper corner")
    h: float = Field(..., gt=0, description="Grid spacing, same units as the coordinates")

    @model_validator(mode="after")
    def check_box(self):
        if len(self.lo) != len(self.hi) or not 1 <= len(self.lo) <= 4:
            raise DimensionMismatch(f"window corners {self.lo} and {self.hi} do not match")
        lo, hi = np.asarray(self.lo), np.asarray(self.hi)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("window corners must be finite")
        if not np.all(lo < hi):
            raise ValueError(f"window needs lo < hi componentwise, got {self.lo} / {self.hi}")
        if self.h > float(np.min(hi - lo)) * (1 + _WINDOW_SLACK):
            raise ValueError(f"grid step {self.h} exceeds the smallest window side")
        return self

    @classmethod
    def cube(cls, dim: int, lo: float, hi: float, h: float) -> "GridWindow":
        return cls(lo=(float(lo),) * dim, hi=(float(hi),) * dim, h=float(h))

    @classmethod
    def from_corners(cls, corners, h: float) -> "GridWindow":
        """Build from a ((lo...), (hi...)) pair as stored in config"""
        lo, hi = corners
        return cls(lo=tuple(float(v) for v in lo), hi=tuple(float(v) for v in hi), h=float(h))

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def lo_array(self) -> np.ndarray:
        return np.asarray(self.lo, dtype=float)

    @property
    def hi_array(self) -> np.ndarray:
        return np.asarray(self.hi, dtype=float)

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.hi_array - self.lo_array))

    @property
    def min_side(self) -> float:
        return float(np.min(self.hi_array - self.lo_array))

    def axis_nodes(self, axis: int, step: Optional[float] = None) -> np.ndarray:
        step = self.h if step is None else step
        lo, hi = self.lo[axis], self.hi[axis]
        count = int(np.floor((hi - lo) / step + 1e-9))
        nodes = lo + step * np.arange(count + 1)
        if hi - nodes[-1] > 1e-12 * max(1.0, abs(hi)):
            nodes = np.append(nodes, hi)
        return nodes

    def node_count(self, step: Optional[float] = None) -> int:
        step = self.h if step is None else step
        return int(np.prod([np.floor((b - a) / step + 1e-9) + 2 for a, b in zip(self.lo, self.hi)]))

    def nodes(self, step: Optional[float] = None) -> np.ndarray:
        """Grid nodes {lo + k h} (plus the hi corner row) as an (N, p) array"""
        if self.node_count(step) > config.MAX_SAMPLES:
            raise InfeasibleFidelity(f"grid of {self.node_count(step)} nodes exceeds MAX_SAMPLES")
        axes = [self.axis_nodes(k, step) for k in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack(mesh, axis=-1).reshape(-1, self.dim)

    def shrink(self, margin: float) -> "GridWindow":
        lo = self.lo_array + margin
        hi = self.hi_array - margin
        if not np.all(lo < hi):
            raise EmptyAfterShrink(f"margin {margin} empties the window {self.lo} / {self.hi}")
        return GridWindow(lo=tuple(lo.tolist()), hi=tuple(hi.tolist()), h=min(self.h, float(np.min(hi - lo))))

    def inflate(self, radius: float) -> "GridWindow":
        return GridWindow(
            lo=tuple((self.lo_array - radius).tolist()),
            hi=tuple((self.hi_array + radius).tolist()),
            h=self.h,
        )

    def intersect(self, other: "GridWindow") -> "GridWindow":
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot intersect {self.dim}-D and {other.dim}-D windows")
        lo = np.maximum(self.lo_array, other.lo_array)
        hi = np.minimum(self.hi_array, other.hi_array)
        if not np.all(lo < hi):
            raise WindowMismatch("windows do not overlap")
        return GridWindow(lo=tuple(lo.tolist()), hi=tuple(hi.tolist()),
                          h=min(self.h, other.h, float(np.min(hi - lo))))

    def product(self, other: "GridWindow") -> "GridWindow":
        """Window on the product space (source coordinates first)"""
        return GridWindow(lo=self.lo + other.lo, hi=self.hi + other.hi, h=min(self.h, other.h))

    def contains(self, points, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        slack = tol + _WINDOW_SLACK * max(1.0, float(np.max(np.abs(self.lo + self.hi))))
        return np.all((pts >= self.lo_array - slack) & (pts <= self.hi_array + slack), axis=1)

    def contains_window(self, other: "GridWindow", tol: float = 0.0) -> bool:
        corners = np.vstack([other.lo_array, other.hi_array])
        return bool(np.all(self.contains(corners, tol)))


class SampledSet(BaseModel):
    """Certified finite sample of a closed set: every sample is within eps of the set and vice versa on the window"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    points: np.ndarray = Field(..., description="(N, p) array of sample points")
    eps: float = Field(..., ge=0, description="Certification radius")
    window: GridWindow = Field(..., description="Region of validity")
    label: str = Field("", description="Family and index the sample was built from")

    _tree: Optional[cKDTree] = PrivateAttr(default=None)

    @field_validator("points", mode="before")
    @classmethod
    def check_points(cls, v):
        array = as_points(v).copy()
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def check_window(self):
        if self.points.shape[1] != self.window.dim:
            raise DimensionMismatch(
                f"{self.points.shape[1]}-D points in a {self.window.dim}-D window"
            )
        reach = self.window.diameter + self.eps
        if not np.all(self.window.contains(self.points, reach)):
            raise ValueError("sample points outside the window inflated by its diameter")
        return self

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def tree(self) -> cKDTree:
        if self._tree is None:
            self._tree = cKDTree(self.points)
        return self._tree

    def inside(self, window: GridWindow) -> np.ndarray:
        """Samples lying in the given window"""
        return self.points[window.contains(self.points)]


class DefectPair(BaseModel):
    """Violations of the liminf (lower) and limsup (upper) inclusions on a window"""
    model_config = ConfigDict(frozen=True)

    lower_defect: float = Field(..., ge=0, description="sup over limit samples of distance to the n-th set")
    upper_defect: float = Field(..., ge=0, description="sup over n-th samples of distance to the limit set")

    @property
    def value(self) -> float:
        return max(self.lower_defect, self.upper_defect)

    def within(self, bound: float) -> bool:
        return self.lower_defect <= bound and self.upper_defect <= bound


# ---------------------------------------------------------------------------
# Distance functions and defects
# ---------------------------------------------------------------------------

def eval_dist(S: SampledSet, x) -> float:
    """Distance from x to the sample"""
    point = as_point(x, S.dim)
    distance, _ = S.tree.query(point)
    return float(distance)


def eval_dist_many(S: SampledSet, xs) -> np.ndarray:
    xs = as_points(xs, S.dim)
    distances, _ = S.tree.query(xs)
    return distances


def dist_deviation(S1: SampledSet, S2: SampledSet, grid: GridWindow) -> float:
    """Sup-norm deviation of the two distance functions over the grid nodes"""
    if S1.dim != S2.dim or grid.dim != S1.dim:
        raise DimensionMismatch("samples and grid must share one dimension")
    for S in (S1, S2):
        if not S.window.contains_window(grid):
            raise WindowMismatch(f"grid {grid.lo}/{grid.hi} leaves the validity window of {S.label or 'a sample'}")
    nodes = grid.nodes()
    deviation = np.abs(eval_dist_many(S1, nodes) - eval_dist_many(S2, nodes))
    return float(np.max(deviation))


def default_margin(*samples: SampledSet) -> float:
    h = min(S.window.h for S in samples)
    eps = max(S.eps for S in samples)
    return 2.0 * h + 2.0 * eps


def kuratowski_defects(S_n: SampledSet, S_limit: SampledSet, margin: Optional[float] = None) -> DefectPair:
    """
    Lower and upper Kuratowski defects inside the margin-shrunk common window

    Either component is zero when no sample of the corresponding set
    survives the shrink; both empty raises EmptyAfterShrink. Values are
    clipped at the window diameter.
    """
    if S_n.dim != S_limit.dim:
        raise DimensionMismatch(f"cannot compare {S_n.dim}-D and {S_limit.dim}-D samples")
    margin = default_margin(S_n, S_limit) if margin is None else margin
    if margin < 0:
        raise ValueError("margin must be non-negative")
    window = S_n.window.intersect(S_limit.window)
    if 2 * margin >= window.min_side:
        raise EmptyAfterShrink(f"margin {margin} is not below half the window side {window.min_side}")
    shrunk = window.shrink(margin)

    limit_pts = S_limit.inside(shrunk)
    seq_pts = S_n.inside(shrunk)
    if len(limit_pts) == 0 and len(seq_pts) == 0:
        raise EmptyAfterShrink("no samples survive the margin shrink")

    cap = window.diameter
    lower = float(np.max(S_n.tree.query(limit_pts)[0])) if len(limit_pts) else 0.0
    upper = float(np.max(S_limit.tree.query(seq_pts)[0])) if len(seq_pts) else 0.0
    return DefectPair(lower_defect=min(lower, cap), upper_defect=min(upper, cap))


# ---------------------------------------------------------------------------
# Finite-sequence convergence criteria
# ---------------------------------------------------------------------------

SeriesLike = Sequence[Union[DefectPair, float]]


def _components(series: SeriesLike) -> List[np.ndarray]:
    if not series:
        raise EmptyInput("empty defect series")
    if isinstance(series[0], DefectPair):
        return [np.array([d.lower_defect for d in series]), np.array([d.upper_defect for d in series])]
    return [np.asarray(series, dtype=float)]


def _half_index(n_list: Optional[Sequence[int]], length: int) -> int:
    if n_list is None:
        return length // 2
    target = n_list[-1] / 2.0
    candidates = [k for k, n in enumerate(n_list) if n <= target]
    return candidates[-1] if candidates else 0


def converges(series: SeriesLike, tol: float, n_list: Optional[Sequence[int]] = None) -> bool:
    """Final defect within tol and no larger than the defect at n_max / 2"""
    half = _half_index(n_list, len(series))
    values = np.max(np.vstack(_components(series)), axis=0)
    return bool(values[-1] <= tol and values[-1] <= values[half] + 1e-12)


def diverges(series: SeriesLike, tol: float, threshold: Optional[float] = None) -> bool:
    """Some defect component stays at or above 2 tol over the last half of the series"""
    bound = 2.0 * tol if threshold is None else threshold
    start = len(series) // 2
    return any(bool(np.all(values[start:] >= bound)) for values in _components(series))


# ---------------------------------------------------------------------------
# Corpus families
# ---------------------------------------------------------------------------

class Family(str, Enum):
    """Analytic set families; values double as command-line names"""
    PAPER_X_N = "paper-x-n"
    REAL_LINE = "real-line"
    ORIGIN = "origin"
    TWO_POINTS = "two-points"
    CIRCLE = "circle"
    CIRCLE_AND_ORIGIN = "circle-and-origin"
    DISC = "disc"
    ANNULUS = "annulus"
    ANNULUS_SOLID = "annulus-solid"
    NGON = "ngon"
    NGON_BOUNDARY = "ngon-boundary"
    SHIFTED_DISC = "shifted-disc"
    SHIFTED_DISC_BOUNDARY = "shifted-disc-boundary"
    COMPLEMENT = "complement"
    COMPLEMENT_BOUNDARY = "complement-boundary"
    HALF_DISC = "half-disc"
    HALF_DISC_BOUNDARY = "half-disc-boundary"
    HALF_DISC_ARC = "half-disc-arc"
    HALF_DISC_ARC_BOUNDARY = "half-disc-arc-boundary"
    HORNS = "horns"
    HORNS_BOUNDARY = "horns-boundary"
    DISC_AND_SEGMENT = "disc-and-segment"
    FIBER_XY = "fiber-xy"
    FIBER_ZERO = "fiber-zero"
    SPHERE_3D = "sphere-3d"

    @classmethod
    def parse(cls, name: Union[str, "Family"]) -> "Family":
        if isinstance(name, Family):
            return name
        key = str(name).strip()
        for member in cls:
            if key in (member.value, member.name, member.name.lower()):
                return member
        raise UnknownFamily(f"unknown family '{name}'")


# Families whose K-limit along n is known in closed form
_LIMITS = {
    Family.PAPER_X_N: Family.REAL_LINE,
    Family.TWO_POINTS: Family.ORIGIN,
    Family.CIRCLE: Family.CIRCLE,
    Family.ANNULUS: Family.CIRCLE_AND_ORIGIN,
    Family.ANNULUS_SOLID: Family.DISC,
    Family.NGON: Family.DISC,
    Family.NGON_BOUNDARY: Family.CIRCLE,
    Family.SHIFTED_DISC_BOUNDARY: Family.REAL_LINE,
    Family.COMPLEMENT: Family.COMPLEMENT,
    Family.COMPLEMENT_BOUNDARY: Family.CIRCLE,
    Family.HALF_DISC_BOUNDARY: Family.DISC_AND_SEGMENT,
    Family.HALF_DISC_ARC_BOUNDARY: Family.DISC_AND_SEGMENT,
    Family.HORNS_BOUNDARY: Family.DISC_AND_SEGMENT,
    Family.FIBER_XY: Family.FIBER_ZERO,
    Family.SPHERE_3D: Family.SPHERE_3D,
}

# Region families and the family holding their boundary
BOUNDARY_OF = {
    Family.DISC: Family.CIRCLE,
    Family.ANNULUS_SOLID: Family.ANNULUS,
    Family.NGON: Family.NGON_BOUNDARY,
    Family.SHIFTED_DISC: Family.SHIFTED_DISC_BOUNDARY,
    Family.COMPLEMENT: Family.COMPLEMENT_BOUNDARY,
    Family.HALF_DISC: Family.HALF_DISC_BOUNDARY,
    Family.HALF_DISC_ARC: Family.HALF_DISC_ARC_BOUNDARY,
    Family.HORNS: Family.HORNS_BOUNDARY,
}

_DIMENSIONS = {
    Family.PAPER_X_N: (1,),
    Family.REAL_LINE: (1, 2),
    Family.ORIGIN: (1, 2, 3),
    Family.TWO_POINTS: (1, 2),
    Family.SPHERE_3D: (3,),
}


def _check_fidelity(eps: float, window: GridWindow) -> None:
    if not np.isfinite(eps) or eps < config.MIN_RESOLVABLE_EPS:
        raise InfeasibleFidelity(f"eps={eps} is below the resolvable limit {config.MIN_RESOLVABLE_EPS}")
    if eps > window.min_side:
        raise InfeasibleFidelity(f"eps={eps} exceeds the window side {window.min_side}")


def _check_size(count: float, family: Family) -> None:
    if count > config.MAX_SAMPLES:
        raise InfeasibleFidelity(f"{family.value}: about {int(count)} samples exceed MAX_SAMPLES={config.MAX_SAMPLES}")


def _interval_samples(a: float, b: float, step: float) -> np.ndarray:
    if b < a:
        return np.empty(0)
    count = max(1, int(np.ceil((b - a) / step)))
    return np.linspace(a, b, count + 1)


def _segment(a, b, step: float) -> np.ndarray:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    count = max(1, int(np.ceil(np.linalg.norm(b - a) / step)))
    t = np.linspace(0.0, 1.0, count + 1)[:, None]
    return a + t * (b - a)


def _arc(center, radius: float, step: float, start: float = 0.0, stop: float = 2 * np.pi) -> np.ndarray:
    count = max(8, int(np.ceil(radius * (stop - start) / step)))
    theta = np.linspace(start, stop, count + 1)
    return np.column_stack([center[0] + radius * np.cos(theta), center[1] + radius * np.sin(theta)])


def regular_polygon(n: int) -> np.ndarray:
    """Vertices of the regular n-gon inscribed in the unit circle, counterclockwise"""
    theta = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(theta), np.sin(theta)])


def _polygon_edges(vertices: np.ndarray, step: float) -> np.ndarray:
    closed = np.vstack([vertices, vertices[:1]])
    return np.vstack([_segment(a, b, step) for a, b in zip(closed[:-1], closed[1:])])


def _in_polygon(vertices: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    closed = np.vstack([vertices, vertices[:1]])

    def member(z):
        inside = np.ones(z.shape[:-1], dtype=bool)
        for a, b in zip(closed[:-1], closed[1:]):
            inside &= (b[0] - a[0]) * (z[..., 1] - a[1]) - (b[1] - a[1]) * (z[..., 0] - a[0]) >= 0
        return inside
    return member


class _Region(BaseModel):
    """Fat part of a region family given by a membership test"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    member: Optional[Callable[[np.ndarray], np.ndarray]] = None
    curves_cover_boundary: bool = True
    bbox: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None


def _bisect_boundary(member, inside: np.ndarray, outside: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized bisection on segments whose endpoints straddle the membership boundary"""
    if len(inside) == 0:
        return inside
    width = float(np.max(np.linalg.norm(outside - inside, axis=1)))
    for _ in range(max(1, int(np.ceil(np.log2(max(width / tol, 2.0)))))):
        mid = 0.5 * (inside + outside)
        hit = member(mid)
        inside = np.where(hit[:, None], mid, inside)
        outside = np.where(hit[:, None], outside, mid)
    return inside


def _sample_fat(member, lo: np.ndarray, hi: np.ndarray, eps: float, family: Family) -> Tuple[np.ndarray, np.ndarray]:
    """Grid interior and bisected boundary of {member} inside the box [lo, hi]"""
    step = eps / 2.0
    _check_size(np.prod(np.ceil((hi - lo) / step) + 1), family)
    # nodes sit on the lattice step * Z^2 shared by every region sample
    xs = step * np.arange(np.floor(lo[0] / step), np.ceil(hi[0] / step) + 1)
    ys = step * np.arange(np.floor(lo[1] / step), np.ceil(hi[1] / step) + 1)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    inside = member(grid)

    boundary = []
    for axis in (0, 1):
        a = grid[:-1, :] if axis == 0 else grid[:, :-1]
        b = grid[1:, :] if axis == 0 else grid[:, 1:]
        ia = inside[:-1, :] if axis == 0 else inside[:, :-1]
        ib = inside[1:, :] if axis == 0 else inside[:, 1:]
        flip = ia != ib
        a, b, ia = a[flip], b[flip], ia[flip]
        inner = np.where(ia[:, None], a, b)
        outer = np.where(ia[:, None], b, a)
        boundary.append(_bisect_boundary(member, inner, outer, eps / 4.0))
    boundary = np.vstack(boundary) if boundary else np.empty((0, 2))
    return grid[inside], boundary


def _region(family: Family, n: int) -> _Region:
    sign = 1.0 if n % 2 == 0 else -1.0
    unit = ((-1.0, -1.0), (1.0, 1.0))

    def disc(z):
        return z[..., 0] ** 2 + z[..., 1] ** 2 <= 1.0

    def half(z):
        return disc(z) & (sign * z[..., 1] >= 0)

    def arc_gap(step):
        # unit circle minus the open disc of radius 1/n around -sign*i
        arc = _arc((0.0, 0.0), 1.0, step)
        far = np.hypot(arc[:, 0], arc[:, 1] + sign) >= 1.0 / n
        return arc[far]

    if family == Family.DISC:
        return _Region(member=disc, bbox=unit)
    if family == Family.ANNULUS_SOLID:
        def annulus(z):
            r2 = z[..., 0] ** 2 + z[..., 1] ** 2
            return (r2 >= 1.0 / n ** 2) & (r2 <= 1.0)
        return _Region(member=annulus, bbox=unit)
    if family == Family.NGON:
        vertices = regular_polygon(n)
        return _Region(member=_in_polygon(vertices), bbox=unit)
    if family == Family.SHIFTED_DISC:
        cy = sign * n

        def shifted(z):
            return z[..., 0] ** 2 + (z[..., 1] - cy) ** 2 <= float(n) ** 2
        return _Region(member=shifted)
    if family == Family.COMPLEMENT:
        return _Region(member=lambda z: z[..., 0] ** 2 + z[..., 1] ** 2 >= 1.0)
    if family in (Family.HALF_DISC, Family.HALF_DISC_ARC):
        return _Region(member=half, bbox=unit)
    if family == Family.HORNS:
        cy = -sign * 2.0 / n

        def horns(z):
            crescent = disc(z) & (z[..., 0] ** 2 + (z[..., 1] - cy) ** 2 >= (1.0 - 1.0 / n) ** 2)
            return half(z) | crescent
        return _Region(member=horns, curves_cover_boundary=False, bbox=unit)
    raise UnknownFamily(f"{family.value} is not a region family")


def _region_curves(family: Family, n: int, step: float, reach: GridWindow) -> List[np.ndarray]:
    """Explicit curve pieces: the full boundary for most families, the thin arcs for the half-disc ones"""
    sign = 1.0 if n % 2 == 0 else -1.0
    if family in (Family.DISC, Family.COMPLEMENT):
        return [_arc((0, 0), 1.0, step)]
    if family == Family.ANNULUS_SOLID:
        return [_arc((0, 0), 1.0, step), _arc((0, 0), 1.0 / n, step)]
    if family == Family.NGON:
        return [_polygon_edges(regular_polygon(n), step)]
    if family == Family.SHIFTED_DISC:
        arc = _arc((0.0, sign * n), float(n), step)
        return [arc[reach.contains(arc)]]
    arc = _arc((0, 0), 1.0, step)
    segment = _segment((-1.0, 0.0), (1.0, 0.0), step)
    if family == Family.HALF_DISC:
        return [arc, segment]
    gap = np.hypot(arc[:, 0], arc[:, 1] + sign) >= 1.0 / n
    if family == Family.HALF_DISC_ARC:
        return [arc[gap], segment]
    if family == Family.HORNS:
        return [arc[gap]]
    return []


def _sample_region(family: Family, n: int, window: GridWindow, eps: float, boundary: bool) -> np.ndarray:
    """Solid or boundary sample of a region family, truncated to a padded window"""
    region = _region(family, n)
    pad = window.inflate(0.25 * window.diameter) if region.bbox is None else window.inflate(eps)
    curves = _region_curves(family, n, eps / 2.0, pad)
    if region.bbox is not None:
        lo = np.maximum(np.asarray(region.bbox[0]) - eps, pad.lo_array)
        hi = np.minimum(np.asarray(region.bbox[1]) + eps, pad.hi_array)
    else:
        lo, hi = pad.lo_array, pad.hi_array

    need_fat = not boundary or not region.curves_cover_boundary
    pieces = [c for c in curves if len(c)]
    if need_fat and np.all(lo < hi):
        interior, edge = _sample_fat(region.member, lo, hi, eps, family)
        pieces.append(edge)
        if not boundary:
            pieces.append(interior)
    pieces = [p for p in pieces if len(p)]
    if not pieces:
        raise EmptyInput(f"{family.value} at n={n} has no points near the window")
    points = np.vstack(pieces)
    return points[pad.contains(points)]


def _curve_family(family: Family, n: int, window: GridWindow, eps: float) -> np.ndarray:
    step = eps
    if family == Family.CIRCLE:
        return _arc((0, 0), 1.0, step)
    if family == Family.CIRCLE_AND_ORIGIN:
        return np.vstack([_arc((0, 0), 1.0, step), [[0.0, 0.0]]])
    if family == Family.ANNULUS:
        return np.vstack([_arc((0, 0), 1.0, step), _arc((0, 0), 1.0 / n, step)])
    if family == Family.NGON_BOUNDARY:
        return _polygon_edges(regular_polygon(n), step)
    if family == Family.DISC_AND_SEGMENT:
        return np.vstack([_arc((0, 0), 1.0, step), _segment((-1.0, 0.0), (1.0, 0.0), step)])
    raise UnknownFamily(f"{family.value} is not a curve family")


def _sphere(eps: float) -> np.ndarray:
    # Fibonacci lattice with mean spacing below eps
    count = int(np.ceil(4 * np.pi / eps ** 2))
    _check_size(count, Family.SPHERE_3D)
    k = np.arange(count) + 0.5
    phi = np.arccos(1 - 2 * k / count)
    theta = np.pi * (1 + 5 ** 0.5) * k
    return np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])


def make_family(family_id, n: int, window: GridWindow, eps: float) -> SampledSet:
    """Certified sample of the named analytic family at index n on the window"""
    family = Family.parse(family_id)
    if n < 1:
        raise ValueError(f"family index must be positive, got {n}")
    _check_fidelity(eps, window)
    dims = _DIMENSIONS.get(family, (2,))
    if window.dim not in dims:
        raise DimensionMismatch(f"{family.value} lives in dimension {dims}, window is {window.dim}-D")

    # unbounded pieces are truncated to the window inflated by its diameter
    reach = window.inflate(window.diameter)

    if family == Family.PAPER_X_N:
        a, b = reach.lo[0], reach.hi[0]
        _check_size((b - a) / eps, family)
        pts = np.concatenate([_interval_samples(a, -1.0 / n, eps), _interval_samples(1.0 / n, b, eps)])
        points = pts.reshape(-1, 1)
    elif family == Family.REAL_LINE:
        a, b = reach.lo[0], reach.hi[0]
        _check_size((b - a) / eps, family)
        xs = _interval_samples(a, b, eps)
        points = xs.reshape(-1, 1) if window.dim == 1 else np.column_stack([xs, np.zeros_like(xs)])
    elif family == Family.ORIGIN:
        points = np.zeros((1, window.dim))
    elif family == Family.TWO_POINTS:
        points = np.array([[-1.0 / n], [1.0 / n]])
        if window.dim == 2:
            points = np.column_stack([points[:, 0], np.zeros(2)])
    elif family in (Family.FIBER_XY, Family.FIBER_ZERO):
        from level_sets import fiber_zero_set, sample_level_set, cubic_fiber_function
        if family == Family.FIBER_ZERO:
            points = fiber_zero_set(window, eps)
        else:
            sample = sample_level_set(cubic_fiber_function, 1.0 / n, window, eps)
            points = sample.points
    elif family == Family.SPHERE_3D:
        points = _sphere(eps)
    elif family in BOUNDARY_OF:
        points = _sample_region(family, n, window, eps, boundary=False)
    elif family in BOUNDARY_OF.values() and family not in (
        Family.CIRCLE, Family.ANNULUS, Family.NGON_BOUNDARY,
    ):
        region = next(k for k, v in BOUNDARY_OF.items() if v == family)
        points = _sample_region(region, n, window, eps, boundary=True)
    else:
        points = _curve_family(family, n, window, eps)

    points = points[reach.contains(points, eps)]
    logger.debug(f"{family.value} n={n}: {len(points)} samples at eps={eps}")
    return SampledSet(points=points, eps=eps, window=window, label=f"{family.value}[{n}]")


def limit_family(family_id, window: GridWindow, eps: float) -> SampledSet:
    """Sample of the Kuratowski limit of a family with a known limit"""
    family = Family.parse(family_id)
    if family not in _LIMITS:
        raise UnknownFamily(f"{family.value} has no registered limit")
    limit = _LIMITS[family]
    sample = make_family(limit, 1, window, eps)
    return SampledSet(points=sample.points, eps=eps, window=window, label=f"lim {family.value}")


def has_limit(family_id) -> bool:
    return Family.parse(family_id) in _LIMITS


def family_dimensions(family_id) -> Tuple[int, ...]:
    """Ambient dimensions a family can be sampled in"""
    return _DIMENSIONS.get(Family.parse(family_id), (2,))


def convex_hull_sample(S: SampledSet, eps: Optional[float] = None) -> SampledSet:
    """Solid sample of the convex hull of a 2-D sample"""
    eps = S.eps if eps is None else eps
    hull = convex_hull(S.points)
    verts = hull.vertex_array
    if len(verts) < 3:
        pieces = [verts] if len(verts) == 1 else [_segment(verts[0], verts[1], eps / 2.0)]
        points = np.vstack(pieces)
    else:
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        interior, _ = _sample_fat(_in_polygon(verts), lo, hi, eps, Family.DISC)
        points = np.vstack([interior, _polygon_edges(verts, eps / 2.0)])
    return SampledSet(points=points, eps=eps, window=S.window, label=f"conv {S.label}")


def hull_boundary_sample(S: SampledSet, eps: Optional[float] = None) -> SampledSet:
    """Sample of the boundary of the convex hull of a 2-D sample"""
    eps = S.eps if eps is None else eps
    verts = convex_hull(S.points).vertex_array
    if len(verts) < 3:
        points = verts if len(verts) == 1 else _segment(verts[0], verts[1], eps / 2.0)
    else:
        points = _polygon_edges(verts, eps / 2.0)
    return SampledSet(points=points, eps=eps, window=S.window, label=f"bd conv {S.label}")


def sample_sequence(family_id, n_list: Iterable[int], window: GridWindow, eps: float) -> List[SampledSet]:
    return [make_family(family_id, n, window, eps) for n in n_list]
