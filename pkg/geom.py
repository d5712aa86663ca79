#!/usr/bin/env python3
"""
Geometric primitives shared by every other module

Points are float64 numpy vectors, point sets are (N, p) arrays. Convex
polytopes (the values of subdifferentials) are pydantic models in canonical
form. Orientation and in-circle signs are decided exactly: a floating-point
evaluation is accepted when it clears a forward error bound, otherwise the
determinant is recomputed with Fractions.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from errors import DimensionMismatch, EmptyInput, NonFiniteCoordinate

logger = logging.getLogger(__name__)

# Half the machine epsilon (2^-53) and the a-priori error bounds of the
# floating evaluation of orient2d / incircle.
_EPSILON = np.finfo(float).eps / 2.0
CCW_ERRBOUND = (3.0 + 16.0 * _EPSILON) * _EPSILON
ICC_ERRBOUND = (10.0 + 96.0 * _EPSILON) * _EPSILON


def as_point(coords, dim: Optional[int] = None) -> np.ndarray:
    """Validate one point: finite coordinates, dimension 1 to 3"""
    point = np.atleast_1d(np.asarray(coords, dtype=float))
    if point.ndim != 1 or not 1 <= point.size <= 3:
        raise DimensionMismatch(f"a point needs 1 to 3 coordinates, got shape {point.shape}")
    if dim is not None and point.size != dim:
        raise DimensionMismatch(f"expected a {dim}-D point, got {point.size}-D")
    if not np.all(np.isfinite(point)):
        raise NonFiniteCoordinate(f"non-finite coordinate in {point.tolist()}")
    return point


def as_points(points, dim: Optional[int] = None) -> np.ndarray:
    """Validate a finite point set and return it as an (N, p) array"""
    try:
        array = np.asarray(points, dtype=float)
    except ValueError as e:
        raise DimensionMismatch(f"points of mixed dimension: {e}") from e
    if array.size == 0:
        raise EmptyInput("empty point set")
    if array.ndim == 1:
        array = array.reshape(-1, 1)
    if array.ndim != 2:
        raise DimensionMismatch(f"expected an (N, p) array, got shape {array.shape}")
    if dim is not None and array.shape[1] != dim:
        raise DimensionMismatch(f"expected {dim}-D points, got {array.shape[1]}-D")
    if not np.all(np.isfinite(array)):
        raise NonFiniteCoordinate("non-finite coordinate in point set")
    return array


# ---------------------------------------------------------------------------
# Sign predicates
# ---------------------------------------------------------------------------

def _sign(value) -> int:
    return (value > 0) - (value < 0)


def _exact_orient(a, b, c) -> int:
    ax, ay = Fraction(float(a[0])), Fraction(float(a[1]))
    bx, by = Fraction(float(b[0])), Fraction(float(b[1]))
    cx, cy = Fraction(float(c[0])), Fraction(float(c[1]))
    return _sign((ax - cx) * (by - cy) - (ay - cy) * (bx - cx))


def _exact_incircle(a, b, c, d) -> int:
    dx, dy = Fraction(float(d[0])), Fraction(float(d[1]))
    rows = []
    for p in (a, b, c):
        px = Fraction(float(p[0])) - dx
        py = Fraction(float(p[1])) - dy
        rows.append((px, py, px * px + py * py))
    (adx, ady, alift), (bdx, bdy, blift), (cdx, cdy, clift) = rows
    det = (alift * (bdx * cdy - cdx * bdy)
           + blift * (cdx * ady - adx * cdy)
           + clift * (adx * bdy - bdx * ady))
    return _sign(det)


def orient2d(a, b, c) -> int:
    """
    Sign of the orientation of (a, b, c)

    Returns +1 for a counterclockwise turn, -1 for clockwise, 0 when collinear.
    """
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    errbound = CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _exact_orient(a, b, c)


def incircle(a, b, c, d) -> int:
    """
    Sign of the in-circle determinant

    For counterclockwise (a, b, c): +1 when d is strictly inside their
    circumcircle, -1 when strictly outside, 0 when on it.
    """
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((abs(bdxcdy) + abs(cdxbdy)) * alift
                 + (abs(cdxady) + abs(adxcdy)) * blift
                 + (abs(adxbdy) + abs(bdxady)) * clift)
    errbound = ICC_ERRBOUND * permanent
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _exact_incircle(a, b, c, d)


def orient2d_many(a, b, points: np.ndarray) -> np.ndarray:
    """Vectorized orient2d(a, b, q) for every row q of points"""
    points = np.asarray(points, dtype=float)
    detleft = (a[0] - points[:, 0]) * (b[1] - points[:, 1])
    detright = (a[1] - points[:, 1]) * (b[0] - points[:, 0])
    det = detleft - detright
    errbound = CCW_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    signs = np.sign(det).astype(np.int8)
    for idx in np.flatnonzero(np.abs(det) <= errbound):
        signs[idx] = _exact_orient(a, b, points[idx])
    return signs


def incircle_many(a, b, c, points: np.ndarray) -> np.ndarray:
    """Vectorized incircle(a, b, c, q) for every row q of points"""
    points = np.asarray(points, dtype=float)
    adx, ady = a[0] - points[:, 0], a[1] - points[:, 1]
    bdx, bdy = b[0] - points[:, 0], b[1] - points[:, 1]
    cdx, cdy = c[0] - points[:, 0], c[1] - points[:, 1]

    bdxcdy, cdxbdy = bdx * cdy, cdx * bdy
    cdxady, adxcdy = cdx * ady, adx * cdy
    adxbdy, bdxady = adx * bdy, bdx * ady
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy

    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = ((np.abs(bdxcdy) + np.abs(cdxbdy)) * alift
                 + (np.abs(cdxady) + np.abs(adxcdy)) * blift
                 + (np.abs(adxbdy) + np.abs(bdxady)) * clift)
    signs = np.sign(det).astype(np.int8)
    for idx in np.flatnonzero(np.abs(det) <= ICC_ERRBOUND * permanent):
        signs[idx] = _exact_incircle(a, b, c, points[idx])
    return signs


# ---------------------------------------------------------------------------
# Convex polytopes
# ---------------------------------------------------------------------------

class ConvexPolytope(BaseModel):
    """Compact convex value of a subdifferential, kept in canonical form"""
    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Tuple[float, ...], ...] = Field(
        ..., description="(lo, hi) endpoints in 1-D; counterclockwise extreme points in 2-D"
    )

    @field_validator("vertices")
    @classmethod
    def check_vertices(cls, v):
        if not v:
            raise EmptyInput("a polytope needs at least one vertex")
        dims = {len(vertex) for vertex in v}
        if len(dims) != 1:
            raise DimensionMismatch(f"vertices of mixed dimension {sorted(dims)}")
        if not all(np.isfinite(c) for vertex in v for c in vertex):
            raise NonFiniteCoordinate("non-finite polytope vertex")
        if dims == {1} and (len(v) != 2 or v[0][0] > v[1][0]):
            raise ValueError("1-D polytopes are stored as an ordered pair (lo, hi)")
        return v

    @classmethod
    def interval(cls, lo: float, hi: float) -> "ConvexPolytope":
        lo, hi = float(lo), float(hi)
        if lo > hi:
            lo, hi = hi, lo
        return cls(vertices=((lo,), (hi,)))

    @classmethod
    def singleton(cls, point) -> "ConvexPolytope":
        point = as_point(point)
        if point.size == 1:
            return cls.interval(point[0], point[0])
        return cls(vertices=(tuple(point.tolist()),))

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @property
    def vertex_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    @property
    def lo(self) -> float:
        return self.vertices[0][0]

    @property
    def hi(self) -> float:
        return self.vertices[-1][0]

    @property
    def is_singleton(self) -> bool:
        return len(set(self.vertices)) == 1

    def diameter(self) -> float:
        verts = self.vertex_array
        if len(verts) < 2:
            return 0.0
        return float(pdist(verts).max())

    def scaled(self, t: float) -> "ConvexPolytope":
        return convex_hull(self.vertex_array * float(t))

    def translated(self, offset) -> "ConvexPolytope":
        return convex_hull(self.vertex_array + as_point(offset, self.dim))

    def minkowski_sum(self, other: "ConvexPolytope") -> "ConvexPolytope":
        if other.dim != self.dim:
            raise DimensionMismatch(f"cannot add {self.dim}-D and {other.dim}-D polytopes")
        sums = (self.vertex_array[:, None, :] + other.vertex_array[None, :, :]).reshape(-1, self.dim)
        return convex_hull(sums)

    def distance_to(self, x) -> float:
        return distance_to_polytope(x, self)

    def contains(self, x, tol: float = 0.0) -> bool:
        return self.distance_to(x) <= tol

    def includes(self, other: "ConvexPolytope", tol: float = 0.0) -> bool:
        """Whether other lies inside self (checked on the vertices of other)"""
        return all(self.contains(v, tol) for v in other.vertex_array)

    def sample(self, step: float) -> np.ndarray:
        """Dense sample of the body: boundary at spacing step plus interior grid nodes"""
        return sample_polytope(self, step)


def convex_hull(points) -> ConvexPolytope:
    """Canonical convex hull of a finite point set in dimension 1 or 2"""
    pts = as_points(points)
    dim = pts.shape[1]
    if dim == 1:
        return ConvexPolytope.interval(pts[:, 0].min(), pts[:, 0].max())
    if dim != 2:
        raise DimensionMismatch(f"convex_hull supports dimensions 1 and 2, got {dim}")

    order = np.lexsort((pts[:, 1], pts[:, 0]))
    ordered = pts[order]
    keep = np.ones(len(ordered), dtype=bool)
    keep[1:] = np.any(np.diff(ordered, axis=0) != 0.0, axis=1)
    uniq = [tuple(p) for p in ordered[keep].tolist()]
    if len(uniq) == 1:
        return ConvexPolytope(vertices=(uniq[0],))

    # Andrew's monotone chain; non-left turns are popped so collinear points drop out
    lower = []
    for q in uniq:
        while len(lower) >= 2 and orient2d(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    upper = []
    for q in reversed(uniq):
        while len(upper) >= 2 and orient2d(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    hull = lower[:-1] + upper[:-1]
    return ConvexPolytope(vertices=tuple(hull))


def _segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.linalg.norm(x - a))
    t = min(1.0, max(0.0, float((x - a) @ ab) / denom))
    return float(np.linalg.norm(x - (a + t * ab)))


def distance_to_polytope(x, polytope: ConvexPolytope) -> float:
    """Euclidean distance from a point to a convex polytope (0 inside)"""
    x = as_point(x, polytope.dim)
    if polytope.dim == 1:
        return float(max(polytope.lo - x[0], x[0] - polytope.hi, 0.0))
    verts = polytope.vertex_array
    if len(verts) == 1:
        return float(np.linalg.norm(x - verts[0]))
    if len(verts) == 2:
        return _segment_distance(x, verts[0], verts[1])
    edges = list(zip(verts, np.roll(verts, -1, axis=0)))
    if all(orient2d(a, b, x) >= 0 for a, b in edges):
        return 0.0
    return min(_segment_distance(x, a, b) for a, b in edges)


def hausdorff(A, B) -> float:
    """Hausdorff distance between two finite point sets"""
    A = as_points(A)
    B = as_points(B, A.shape[1])
    return max(directed_distance(A, B), directed_distance(B, A))


def directed_distance(A: np.ndarray, B: np.ndarray) -> float:
    """sup over a in A of dist(a, B)"""
    distances, _ = cKDTree(B).query(A)
    return float(np.max(distances))


def polytope_hausdorff(P: ConvexPolytope, Q: ConvexPolytope) -> float:
    """
    Hausdorff distance between two convex polytopes

    The distance to a convex body is convex, so its maximum over a polytope
    is attained at a vertex; checking vertices against the other body is exact.
    """
    if P.dim != Q.dim:
        raise DimensionMismatch(f"cannot compare {P.dim}-D and {Q.dim}-D polytopes")
    forward = max(distance_to_polytope(v, Q) for v in P.vertex_array)
    backward = max(distance_to_polytope(w, P) for w in Q.vertex_array)
    return max(forward, backward)


def sample_polytope(polytope: ConvexPolytope, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("sampling step must be positive")
    verts = polytope.vertex_array
    if polytope.dim == 1:
        lo, hi = polytope.lo, polytope.hi
        count = int(np.ceil((hi - lo) / step))
        return np.linspace(lo, hi, count + 1).reshape(-1, 1)
    if len(verts) == 1:
        return verts.copy()

    closed = verts if len(verts) == 2 else np.vstack([verts, verts[:1]])
    pieces = []
    for a, b in zip(closed[:-1], closed[1:]):
        count = max(1, int(np.ceil(np.linalg.norm(b - a) / step)))
        t = np.linspace(0.0, 1.0, count + 1)[:, None]
        pieces.append(a + t * (b - a))
    if len(verts) >= 3:
        lo, hi = verts.min(axis=0), verts.max(axis=0)
        xs = np.arange(lo[0], hi[0] + step / 2, step)
        ys = np.arange(lo[1], hi[1] + step / 2, step)
        grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)
        inside = np.ones(len(grid), dtype=bool)
        for a, b in zip(closed[:-1], closed[1:]):
            inside &= (b[0] - a[0]) * (grid[:, 1] - a[1]) - (b[1] - a[1]) * (grid[:, 0] - a[0]) >= 0
        pieces.append(grid[inside])
    return np.vstack(pieces)


def polygon_area(vertices: Sequence[Sequence[float]]) -> float:
    """Signed shoelace area (positive for counterclockwise order)"""
    verts = np.asarray(vertices, dtype=float)
    if len(verts) < 3:
        return 0.0
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def is_convex_polygon(vertices: Sequence[Sequence[float]]) -> bool:
    """Convexity certificate: all consecutive turns strictly of one sign"""
    verts = [tuple(v) for v in np.asarray(vertices, dtype=float).tolist()]
    if len(verts) < 3:
        return False
    turns = {orient2d(verts[i - 2], verts[i - 1], verts[i]) for i in range(len(verts))}
    return turns == {1} or turns == {-1}
