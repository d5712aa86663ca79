#!/usr/bin/env python3
"""
Clarke subdifferentials

Exact calculus for continuous piecewise-linear functions of one variable,
metric projections onto sampled sets and the subdifferential of the squared
distance, 2 (x - conv P(x)). Linear functionals are represented by vectors.
"""

import logging
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.spatial.distance import pdist

from errors import DimensionMismatch, HypothesisFailed, OutOfDomain, UnknownFamily
from geom import ConvexPolytope, as_point, convex_hull
from sets import SampledSet, eval_dist

logger = logging.getLogger(__name__)


class PLFunction1D(BaseModel):
    """Continuous piecewise-linear function on [x_0, x_m]"""
    model_config = ConfigDict(frozen=True)

    breakpoints: Tuple[float, ...] = Field(..., description="Strictly increasing x_0 < ... < x_m")
    values: Tuple[float, ...] = Field(..., description="Values y_0 ... y_m at the breakpoints")

    @field_validator("breakpoints", "values")
    @classmethod
    def check_finite(cls, v):
        if not all(np.isfinite(t) for t in v):
            raise ValueError("breakpoints and values must be finite")
        return tuple(float(t) for t in v)

    @model_validator(mode="after")
    def check_shape(self):
        if len(self.breakpoints) < 2:
            raise ValueError("a PL function needs at least two breakpoints")
        if len(self.values) != len(self.breakpoints):
            raise ValueError(f"{len(self.breakpoints)} breakpoints but {len(self.values)} values")
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        return self

    @classmethod
    def from_points(cls, xs: Sequence[float], ys: Sequence[float]) -> "PLFunction1D":
        return cls(breakpoints=tuple(xs), values=tuple(ys))

    @property
    def domain(self) -> Tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.breakpoints)

    @property
    def exact_slopes(self) -> List[Fraction]:
        xs = [Fraction(x) for x in self.breakpoints]
        ys = [Fraction(y) for y in self.values]
        return [(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1)]

    @property
    def lipschitz(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    def in_domain(self, x: float) -> bool:
        return self.breakpoints[0] <= x <= self.breakpoints[-1]

    def evaluate(self, x):
        """Vectorized evaluation; raises OutOfDomain outside [x_0, x_m]"""
        xs = np.asarray(x, dtype=float)
        if np.any(xs < self.breakpoints[0]) or np.any(xs > self.breakpoints[-1]):
            raise OutOfDomain(f"points outside the domain {self.domain}")
        result = np.interp(xs, self.breakpoints, self.values)
        return float(result) if result.ndim == 0 else result

    def exact_value(self, x: Union[float, Fraction]) -> Fraction:
        x = Fraction(x)
        if not Fraction(self.breakpoints[0]) <= x <= Fraction(self.breakpoints[-1]):
            raise OutOfDomain(f"{float(x)} outside the domain {self.domain}")
        k = max(0, min(int(np.searchsorted(self.breakpoints, float(x), side="right")) - 1, len(self.breakpoints) - 2))
        # float search can be off by one near a breakpoint
        while k > 0 and x < Fraction(self.breakpoints[k]):
            k -= 1
        while k < len(self.breakpoints) - 2 and x > Fraction(self.breakpoints[k + 1]):
            k += 1
        x0, y0 = Fraction(self.breakpoints[k]), Fraction(self.values[k])
        return y0 + self.exact_slopes[k] * (x - x0)

    def _refine_with(self, other: "PLFunction1D") -> np.ndarray:
        if self.domain != other.domain:
            raise OutOfDomain(f"domains {self.domain} and {other.domain} differ")
        return np.union1d(self.breakpoints, other.breakpoints)

    def plus(self, other: "PLFunction1D") -> "PLFunction1D":
        xs = self._refine_with(other)
        return PLFunction1D.from_points(xs, self.evaluate(xs) + other.evaluate(xs))

    def scaled(self, t: float) -> "PLFunction1D":
        return PLFunction1D(breakpoints=self.breakpoints, values=tuple(t * y for y in self.values))

    def sup_distance(self, other: "PLFunction1D") -> float:
        """Exact sup-norm distance; the maximum of |f - g| sits on a common breakpoint"""
        xs = self._refine_with(other)
        return float(np.max(np.abs(self.evaluate(xs) - other.evaluate(xs))))


def _locate(f: PLFunction1D, x: float) -> Tuple[int, bool]:
    """Index of the breakpoint at x (exact hit) or of the segment containing x"""
    if not f.in_domain(x):
        raise OutOfDomain(f"{x} outside the domain {f.domain}")
    k = int(np.searchsorted(f.breakpoints, x))
    if k < len(f.breakpoints) and f.breakpoints[k] == x:
        return k, True
    return k - 1, False


def pl_subdifferential(f: PLFunction1D, x: float) -> ConvexPolytope:
    """Clarke subdifferential: hull of the one-sided slopes, a singleton off the breakpoints"""
    k, at_breakpoint = _locate(f, float(x))
    slopes = f.slopes
    if not at_breakpoint:
        return ConvexPolytope.interval(slopes[k], slopes[k])
    if k == 0:
        return ConvexPolytope.interval(slopes[0], slopes[0])
    if k == len(f.breakpoints) - 1:
        return ConvexPolytope.interval(slopes[-1], slopes[-1])
    return ConvexPolytope.interval(min(slopes[k - 1], slopes[k]), max(slopes[k - 1], slopes[k]))


def pl_subdifferential_exact(f: PLFunction1D, x: Union[float, Fraction]) -> Tuple[Fraction, Fraction]:
    """Same as pl_subdifferential with Fraction endpoints"""
    x = Fraction(x)
    xs = [Fraction(b) for b in f.breakpoints]
    if not xs[0] <= x <= xs[-1]:
        raise OutOfDomain(f"{float(x)} outside the domain {f.domain}")
    slopes = f.exact_slopes
    if x in xs:
        k = xs.index(x)
        left = slopes[k - 1] if k > 0 else slopes[0]
        right = slopes[k] if k < len(slopes) else slopes[-1]
        return min(left, right), max(left, right)
    k = next(i for i in range(len(slopes)) if xs[i] < x < xs[i + 1])
    return slopes[k], slopes[k]


def lebourg_witness(f: PLFunction1D, a: float, b: float) -> float:
    """
    Smallest point c in (a, b) with (f(b) - f(a)) / (b - a) in the subdifferential at c

    Candidates are the interior breakpoints and the midpoints of the pieces
    between them, scanned left to right in exact arithmetic.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if not (f.in_domain(a) and f.in_domain(b)):
        raise OutOfDomain(f"[{a}, {b}] is not inside the domain {f.domain}")
    fa, fb = Fraction(a), Fraction(b)
    mean = (f.exact_value(fb) - f.exact_value(fa)) / (fb - fa)

    cuts = [fa] + [Fraction(x) for x in f.breakpoints if a < x < b] + [fb]
    candidates = []
    for left, right in zip(cuts, cuts[1:]):
        candidates.append((left + right) / 2)
        if right != fb:
            candidates.append(right)

    for c in candidates:
        lo, hi = pl_subdifferential_exact(f, c)
        if lo <= mean <= hi:
            return float(c)
    raise HypothesisFailed(f"no mean-value point found on [{a}, {b}]")


# ---------------------------------------------------------------------------
# Metric projections and the squared distance
# ---------------------------------------------------------------------------

class ProjectionSet(BaseModel):
    """Samples realizing the distance from x within a tolerance"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    base_point: np.ndarray = Field(..., description="The point x")
    candidates: np.ndarray = Field(..., description="(K, p) nearest samples")
    radius: float = Field(..., ge=0, description="Attained distance")
    tol: float = Field(..., ge=0, description="Tolerance used to collect candidates")

    @model_validator(mode="after")
    def check_candidates(self):
        if len(self.candidates) == 0:
            raise ValueError("a projection set is never empty")
        return self

    @property
    def diameter(self) -> float:
        if len(self.candidates) < 2:
            return 0.0
        return float(pdist(self.candidates).max())


def default_projection_tol(S: SampledSet) -> float:
    return 2.0 * (S.eps + S.window.h)


def projection_set(S: SampledSet, x, tol: Optional[float] = None) -> ProjectionSet:
    """All samples within radius + tol of x, where radius = dist(x, S)"""
    point = as_point(x)
    if point.size != S.dim:
        raise DimensionMismatch(f"{point.size}-D point against a {S.dim}-D sample")
    tol = default_projection_tol(S) if tol is None else tol
    radius = eval_dist(S, point)
    idx = sorted(S.tree.query_ball_point(point, radius + tol))
    if not idx:
        # query_ball_point is closed but rounding can drop the nearest sample
        idx = [int(S.tree.query(point)[1])]
    return ProjectionSet(base_point=point, candidates=S.points[idx], radius=radius, tol=tol)


def clarke_sq_dist(S: SampledSet, x, tol: Optional[float] = None) -> ConvexPolytope:
    """Subdifferential of dist^2 at x: the hull of 2 (x - c) over projection candidates"""
    projection = projection_set(S, x, tol)
    return convex_hull(2.0 * (projection.base_point - projection.candidates))


def clarke_dist(S: SampledSet, x, tol: Optional[float] = None) -> ConvexPolytope:
    """Subdifferential of dist off the set: hull of the unit vectors (x - c) / |x - c|"""
    projection = projection_set(S, x, tol)
    if projection.radius <= S.eps:
        raise ValueError("dist is not handled on the set itself; use the closed-form table")
    diffs = projection.base_point - projection.candidates
    return convex_hull(diffs / np.linalg.norm(diffs, axis=1, keepdims=True))


def medial_axis_flag(S: SampledSet, x, tol: Optional[float] = None, separation: float = 1.0) -> bool:
    """Whether x has two essentially distinct nearest points"""
    if separation <= 0:
        raise ValueError("separation must be positive")
    return projection_set(S, x, tol).diameter >= separation


# ---------------------------------------------------------------------------
# PL families
# ---------------------------------------------------------------------------

Box = Tuple[Tuple[float, float], Tuple[float, float]]


class PLFamily(str, Enum):
    ABS_SHRINK = "abs-shrink"
    SAWTOOTH = "sawtooth"
    SPIKE = "spike"
    SINGLE_TOOTH = "single-tooth"
    LINEAR_SCALE = "linear-scale"
    FIXED_ABS = "fixed-abs"

    @classmethod
    def parse(cls, name) -> "PLFamily":
        if isinstance(name, PLFamily):
            return name
        key = str(name).strip()
        for member in cls:
            if key in (member.value, member.name, member.name.lower()):
                return member
        raise UnknownFamily(f"unknown PL family '{name}'")


def _from_sorted(xs: Sequence[float], ys: Sequence[float]) -> PLFunction1D:
    # collapse coincident breakpoints (small n)
    keep_x, keep_y = [xs[0]], [ys[0]]
    for x, y in zip(xs[1:], ys[1:]):
        if x > keep_x[-1]:
            keep_x.append(x)
            keep_y.append(y)
    return PLFunction1D.from_points(keep_x, keep_y)


def abs_function() -> PLFunction1D:
    return PLFunction1D.from_points([-1.0, 0.0, 1.0], [1.0, 0.0, 1.0])


def zero_function() -> PLFunction1D:
    return PLFunction1D.from_points([-1.0, 1.0], [0.0, 0.0])


def sawtooth(n: int, lo: float = -1.0, hi: float = 1.0) -> PLFunction1D:
    """Teeth of height 1/n: zero at even multiples of 1/n, 1/n at odd multiples"""
    ks = np.arange(int(np.ceil(lo * n)), int(np.floor(hi * n)) + 1)
    xs = ks / n
    ys = np.where(ks % 2 == 0, 0.0, 1.0 / n)
    return PLFunction1D.from_points(xs, ys)


def build_pl_family(family_id, n: int) -> PLFunction1D:
    """Member n of a PL corpus family, on [-1, 1]"""
    family = PLFamily.parse(family_id)
    if n < 1:
        raise ValueError(f"family index must be positive, got {n}")
    if family == PLFamily.ABS_SHRINK:
        c = 1.0 - 1.0 / n
        return PLFunction1D.from_points([-1.0, 0.0, 1.0], [c, 0.0, c])
    if family == PLFamily.SAWTOOTH:
        return sawtooth(n)
    if family == PLFamily.SPIKE:
        return _from_sorted([-1.0, -1.0 / n, 0.0, 1.0 / n, 1.0], [1.0, 1.0, 0.0, 1.0, 1.0])
    if family == PLFamily.SINGLE_TOOTH:
        return _from_sorted([-1.0, -1.0 / n, 0.0, 1.0 / n, 1.0], [0.0, 0.0, 1.0 / n, 0.0, 0.0])
    if family == PLFamily.LINEAR_SCALE:
        return PLFunction1D.from_points([-1.0, 1.0], [-1.0 / n, 1.0 / n])
    return abs_function()


class PLFamilySpec(BaseModel):
    """Known limits of a PL family: the uniform limit and the graphical limit of the subdifferentials"""
    model_config = ConfigDict(frozen=True)

    family: PLFamily
    limit: Optional[PLFunction1D] = Field(None, description="Uniform limit, when one exists")
    limit_boxes: Tuple[Box, ...] = Field(..., description="Graph of the limit multifunction as (x-range, y-range) boxes")
    anchor: float = Field(0.0, description="Point alpha with f_n(alpha) convergent")

    @property
    def ae_univalued(self) -> bool:
        """False when some box has both a horizontal and a vertical extent"""
        return not any(xr[1] > xr[0] and yr[1] > yr[0] for xr, yr in self.limit_boxes)

    @property
    def bounded(self) -> bool:
        return all(np.isfinite(v) for _, yr in self.limit_boxes for v in yr)

    def limit_slice(self, x: float) -> Tuple[float, float]:
        """Hull of the limit values at x"""
        ys = [v for xr, yr in self.limit_boxes if xr[0] <= x <= xr[1] for v in yr]
        return min(ys), max(ys)


_ABS_BOXES = (((-1.0, 0.0), (-1.0, -1.0)), ((0.0, 1.0), (1.0, 1.0)), ((0.0, 0.0), (-1.0, 1.0)))

PL_FAMILIES: Dict[PLFamily, PLFamilySpec] = {
    PLFamily.ABS_SHRINK: PLFamilySpec(family=PLFamily.ABS_SHRINK, limit=abs_function(), limit_boxes=_ABS_BOXES),
    PLFamily.SAWTOOTH: PLFamilySpec(family=PLFamily.SAWTOOTH, limit=zero_function(),
                                    limit_boxes=(((-1.0, 1.0), (-1.0, 1.0)),)),
    PLFamily.SPIKE: PLFamilySpec(family=PLFamily.SPIKE, limit=None,
                                 limit_boxes=(((-1.0, 1.0), (0.0, 0.0)), ((0.0, 0.0), (-np.inf, np.inf)))),
    PLFamily.SINGLE_TOOTH: PLFamilySpec(family=PLFamily.SINGLE_TOOTH, limit=zero_function(),
                                        limit_boxes=(((-1.0, 1.0), (0.0, 0.0)), ((0.0, 0.0), (-1.0, 1.0)))),
    PLFamily.LINEAR_SCALE: PLFamilySpec(family=PLFamily.LINEAR_SCALE, limit=zero_function(),
                                        limit_boxes=(((-1.0, 1.0), (0.0, 0.0)),)),
    PLFamily.FIXED_ABS: PLFamilySpec(family=PLFamily.FIXED_ABS, limit=abs_function(), limit_boxes=_ABS_BOXES),
}


def pl_family_spec(family_id) -> PLFamilySpec:
    return PL_FAMILIES[PLFamily.parse(family_id)]


def dist_subdifferential_table(n: int, x: float) -> Tuple[float, float]:
    """
    Closed-form subdifferential of dist to (-inf, -1/n] u [1/n, inf)

    {0} strictly inside the set, {-sgn x} for 0 < |x| < 1/n, [-1, 1] at 0
    and the kinks [0, 1] at -1/n, [-1, 0] at 1/n.
    """
    r = 1.0 / n
    if x == 0:
        return -1.0, 1.0
    if x == -r:
        return 0.0, 1.0
    if x == r:
        return -1.0, 0.0
    if abs(x) > r:
        return 0.0, 0.0
    return -float(np.sign(x)), -float(np.sign(x))


def sq_dist_subdifferential_table(n: int, x: float) -> Tuple[float, float]:
    """Closed-form subdifferential of dist^2 to the same set"""
    if x == 0:
        return -2.0 / n, 2.0 / n
    if abs(x) >= 1.0 / n:
        return 0.0, 0.0
    value = 2.0 * x - 2.0 * float(np.sign(x)) / n
    return value, value
