#!/usr/bin/env python3
"""
Planar Delaunay diagrams with exact empty-circle certificates

Construction is an incremental lexicographic sweep with Lawson flips. All
orientation and in-circle decisions go through the filtered exact
predicates of geom. Degenerate input either raises
GeneralPositionViolation or, with perturb=True, is resolved by symbolic
perturbation: site i moves to p_i + d (i + 1, (i + 1)^2) for an
infinitesimal d > 0. No three points of the moment curve are collinear
and four are co-circular only if their parameters sum to zero, so every
perturbed predicate is decided.

Certificates are verified by a separate brute-force pass that does not
trust the construction.
"""

import logging
from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from errors import Degenerate, DuplicateSites, GeneralPositionViolation, OutsideHull
from geom import (
    as_point,
    as_points,
    convex_hull,
    incircle,
    incircle_many,
    orient2d,
    orient2d_many,
    polygon_area,
)

logger = logging.getLogger(__name__)


def circumcenter(a, b, c) -> Tuple[np.ndarray, float]:
    """Center and radius of the circle through three affinely independent points"""
    pts = sorted([tuple(as_point(v, 2)) for v in (a, b, c)])
    if orient2d(*pts) == 0:
        raise Degenerate(f"collinear points {pts} have no circumcircle")
    p0 = np.asarray(pts[0])
    bx, by = np.asarray(pts[1]) - p0
    cx, cy = np.asarray(pts[2]) - p0
    d = 2.0 * (bx * cy - by * cx)
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return p0 + np.array([ux, uy]), float(np.hypot(ux, uy))


def _check_duplicates(pts: np.ndarray) -> None:
    _, first, counts = np.unique(pts, axis=0, return_index=True, return_counts=True)
    if np.any(counts > 1):
        dup = pts[first[np.argmax(counts > 1)]]
        idx = np.flatnonzero(np.all(pts == dup, axis=1)).tolist()
        raise DuplicateSites(f"sites {idx} coincide at {dup.tolist()}")


# ---------------------------------------------------------------------------
# Symbolic perturbation
# ---------------------------------------------------------------------------

def _padd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    size = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(size)]


def _psub(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    return _padd(a, [-t for t in b])


def _pmul(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, s in enumerate(a):
        for j, t in enumerate(b):
            out[i + j] += s * t
    return out


def _leading_sign(poly: List[Fraction]) -> int:
    for c in poly:
        if c != 0:
            return 1 if c > 0 else -1
    return 0


def _perturbed(pts: np.ndarray, i: int) -> Tuple[List[Fraction], List[Fraction]]:
    w = i + 1
    return [Fraction(float(pts[i, 0])), Fraction(w)], [Fraction(float(pts[i, 1])), Fraction(w * w)]


def sos_orient(pts: np.ndarray, i: int, j: int, k: int) -> int:
    (ax, ay), (bx, by), (cx, cy) = (_perturbed(pts, t) for t in (i, j, k))
    det = _psub(_pmul(_psub(ax, cx), _psub(by, cy)), _pmul(_psub(ay, cy), _psub(bx, cx)))
    return _leading_sign(det)


def sos_incircle(pts: np.ndarray, i: int, j: int, k: int, m: int) -> int:
    dx, dy = _perturbed(pts, m)
    rows = []
    for t in (i, j, k):
        px, py = _perturbed(pts, t)
        ex, ey = _psub(px, dx), _psub(py, dy)
        rows.append((ex, ey, _padd(_pmul(ex, ex), _pmul(ey, ey))))
    (ax, ay, al), (bx, by, bl), (cx, cy, cl) = rows
    det = _padd(
        _padd(
            _pmul(al, _psub(_pmul(bx, cy), _pmul(cx, by))),
            _pmul(bl, _psub(_pmul(cx, ay), _pmul(ax, cy))),
        ),
        _pmul(cl, _psub(_pmul(ax, by), _pmul(bx, ay))),
    )
    return _leading_sign(det)


# ---------------------------------------------------------------------------
# Locally Delaunay edges
# ---------------------------------------------------------------------------

class EdgeCertificate(BaseModel):
    """Witness circle for an edge: sites i and j on it, no site inside"""
    model_config = ConfigDict(frozen=True)

    i: int
    j: int
    locally_delaunay: bool
    center: Optional[Tuple[float, float]] = Field(None, description="Center of an empty circle through both endpoints")
    radius: Optional[float] = None
    cocircular: bool = Field(False, description="The only empty circle also passes through further sites")


def _binding_site(p: np.ndarray, q: np.ndarray, side: np.ndarray, pts: np.ndarray) -> int:
    """
    Site on the left of p->q whose circle through p, q is empty of left sites

    Picked in floating point, then corrected with exact in-circle tests.
    """
    m = 0.5 * (p + q)
    nrm = np.array([-(q[1] - p[1]), q[0] - p[0]])
    diffs = m - pts[side]
    t = (np.sum((m - p) ** 2) - np.sum(diffs ** 2, axis=1)) / (2.0 * diffs @ nrm)
    r = int(side[np.argmin(t)])
    for _ in range(len(side)):
        inside = incircle_many(p, q, pts[r], pts[side])
        if not np.any(inside > 0):
            return r
        r = int(side[np.flatnonzero(inside > 0)[0]])
    return r


def _strictly_between(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> bool:
    px, py, qx, qy, rx, ry = (Fraction(float(v)) for v in (*p, *q, *r))
    return (rx - px) * (qx - px) + (ry - py) * (qy - py) > 0 and (rx - qx) * (px - qx) + (ry - qy) * (py - qy) > 0


def edge_certificate(i: int, j: int, sites) -> EdgeCertificate:
    """Decide whether some circle through sites i and j has no site in its open disc"""
    pts = as_points(sites, 2)
    n = len(pts)
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"invalid edge ({i}, {j}) for {n} sites")
    _check_duplicates(pts)
    p, q = pts[i], pts[j]
    others = np.delete(np.arange(n), [i, j])

    def empty(center, radius, cocircular=False):
        return EdgeCertificate(i=i, j=j, locally_delaunay=True, center=tuple(map(float, center)),
                               radius=float(radius), cocircular=cocircular)

    if len(others) == 0:
        return empty(0.5 * (p + q), 0.5 * np.linalg.norm(q - p))

    signs = orient2d_many(p, q, pts[others])
    for k in others[signs == 0]:
        if _strictly_between(p, q, pts[k]):
            return EdgeCertificate(i=i, j=j, locally_delaunay=False)
    left, right = others[signs > 0], others[signs < 0]

    if len(left) == 0 and len(right) == 0:
        return empty(0.5 * (p + q), 0.5 * np.linalg.norm(q - p))
    if len(left) == 0:
        r = _binding_site(q, p, right, pts)
        center, radius = circumcenter(p, q, pts[r])
        return empty(center, radius)

    r = _binding_site(p, q, left, pts)
    rest = others[others != r]
    signs = incircle_many(p, q, pts[r], pts[rest]) if len(rest) else np.empty(0)
    if np.any(signs > 0):
        return EdgeCertificate(i=i, j=j, locally_delaunay=False)
    if len(right) == 0:
        # the left-binding circle is empty but not unique; any larger one also works
        center, radius = circumcenter(p, q, pts[r])
        return empty(center, radius)
    center, radius = circumcenter(p, q, pts[r])
    return empty(center, radius, cocircular=bool(np.any(signs == 0)))


def is_locally_delaunay(i: int, j: int, sites) -> bool:
    return edge_certificate(i, j, sites).locally_delaunay


# ---------------------------------------------------------------------------
# Triangulation
# ---------------------------------------------------------------------------

class DelaunayDiagram(BaseModel):
    """Triangulation of conv(sites) with per-triangle circumcircles"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sites: np.ndarray = Field(..., description="(N, 2) site coordinates")
    triangles: np.ndarray = Field(..., description="(T, 3) counterclockwise site indices")
    edges: np.ndarray = Field(..., description="(E, 2) undirected edges, i < j")
    locally_delaunay: np.ndarray = Field(..., description="(E,) flag per edge")
    centers: np.ndarray = Field(..., description="(T, 2) circumcenters, NaN for degenerate triangles")
    radii: np.ndarray = Field(..., description="(T,) circumradii, NaN for degenerate triangles")
    perturbed: bool = Field(False, description="Built with symbolic perturbation")

    @field_validator("sites", "triangles", "edges", "locally_delaunay", "centers", "radii")
    @classmethod
    def freeze(cls, v):
        v = np.asarray(v).copy()
        v.setflags(write=False)
        return v

    @property
    def triangle_list(self) -> List[Tuple[int, int, int]]:
        return [tuple(int(v) for v in t) for t in self.triangles]


class _Sweep:
    """Mutable state of one incremental construction"""

    def __init__(self, pts: np.ndarray, perturb: bool):
        self.pts = pts
        self.perturb = perturb
        self.opposite: Dict[Tuple[int, int], int] = {}
        self.hull: List[int] = []

    def orient(self, i: int, j: int, k: int) -> int:
        s = orient2d(self.pts[i], self.pts[j], self.pts[k])
        if s != 0:
            return s
        if not self.perturb:
            raise GeneralPositionViolation(f"collinear sites {i}, {j}, {k}", [(i, j, k)])
        return sos_orient(self.pts, i, j, k)

    def incircle(self, i: int, j: int, k: int, m: int) -> int:
        s = incircle(self.pts[i], self.pts[j], self.pts[k], self.pts[m])
        if s != 0:
            return s
        if not self.perturb:
            raise GeneralPositionViolation(f"co-circular sites {i}, {j}, {k}, {m}", [(i, j, k, m)])
        return sos_incircle(self.pts, i, j, k, m)

    def add(self, a: int, b: int, c: int) -> None:
        self.opposite[(a, b)] = c
        self.opposite[(b, c)] = a
        self.opposite[(c, a)] = b

    def remove(self, a: int, b: int, c: int) -> None:
        for edge in ((a, b), (b, c), (c, a)):
            del self.opposite[edge]

    def legalize(self, a: int, b: int, p: int) -> None:
        stack = [(a, b)]
        while stack:
            a, b = stack.pop()
            w = self.opposite.get((b, a))
            if w is None or self.opposite.get((a, b)) != p:
                continue
            if self.incircle(a, b, p, w) > 0:
                self.remove(a, b, p)
                self.remove(b, a, w)
                self.add(a, w, p)
                self.add(w, b, p)
                stack.extend([(a, w), (w, b)])

    def insert(self, p: int) -> None:
        h = len(self.hull)
        visible = [self.orient(self.hull[k], self.hull[(k + 1) % h], p) < 0 for k in range(h)]
        start = next(k for k in range(h) if visible[k] and not visible[k - 1])
        ring = self.hull[start:] + self.hull[:start]
        count = sum(visible)
        for t in range(count):
            u, v = ring[t], ring[t + 1]
            self.add(v, u, p)
            self.legalize(v, u, p)
        self.hull = [ring[0], p] + ring[count:]

    def triangles(self) -> List[Tuple[int, int, int]]:
        seen = set()
        for (a, b), c in self.opposite.items():
            k = min(range(3), key=lambda t: (a, b, c)[t])
            seen.add(((a, b, c) * 2)[k:k + 3])
        return sorted(seen)


def triangulate(sites, perturb: bool = False) -> DelaunayDiagram:
    """Delaunay triangulation of at least three sites"""
    pts = as_points(sites, 2)
    n = len(pts)
    if n < 3:
        raise ValueError(f"need at least three sites, got {n}")
    _check_duplicates(pts)

    # the sweep order must agree with the perturbation: ties in x go by index
    order = np.lexsort((np.arange(n), pts[:, 0])) if perturb else np.lexsort((pts[:, 1], pts[:, 0]))
    sweep = _Sweep(pts, perturb)

    a, b, c = (int(v) for v in order[:3])
    if sweep.orient(a, b, c) < 0:
        b, c = c, b
    sweep.add(a, b, c)
    sweep.hull = [a, b, c]
    for p in order[3:]:
        sweep.insert(int(p))

    triangles = np.array(sweep.triangles(), dtype=int)
    edges = sorted({tuple(sorted((int(u), int(v)))) for t in triangles for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))})
    edges = np.array(edges, dtype=int)

    centers = np.full((len(triangles), 2), np.nan)
    radii = np.full(len(triangles), np.nan)
    for k, (i, j, m) in enumerate(triangles):
        try:
            centers[k], radii[k] = circumcenter(pts[i], pts[j], pts[m])
        except Degenerate:
            pass
    flags = np.array([edge_certificate(int(i), int(j), pts).locally_delaunay for i, j in edges], dtype=bool)
    logger.debug(f"triangulated {n} sites: {len(triangles)} triangles, {len(edges)} edges")
    return DelaunayDiagram(sites=pts, triangles=triangles, edges=edges, locally_delaunay=flags,
                           centers=centers, radii=radii, perturbed=perturb)


# ---------------------------------------------------------------------------
# Verification and queries
# ---------------------------------------------------------------------------

class CertificateReport(BaseModel):
    """Outcome of the brute-force certificate pass"""
    model_config = ConfigDict(frozen=True)

    triangles: int
    empty_circle_ok: bool
    empty_circle_violations: List[Tuple[int, int]] = Field(default_factory=list, description="(triangle, site) pairs")
    degenerate_triangles: int = 0
    area_sum: float
    hull_area: float
    area_ok: bool
    edges_ok: bool

    @property
    def passed(self) -> bool:
        return self.empty_circle_ok and self.area_ok and self.edges_ok


def verify_certificates(diagram: DelaunayDiagram, rel_tol: float = 1e-9) -> CertificateReport:
    """Exhaustive empty-circle check over all sites, area cover of the hull, edge flags"""
    pts = diagram.sites
    violations = []
    degenerate = 0
    area_sum = 0.0
    for k, (i, j, m) in enumerate(diagram.triangles):
        a, b, c = pts[i], pts[j], pts[m]
        area = polygon_area([a, b, c])
        area_sum += area
        if orient2d(a, b, c) <= 0:
            degenerate += 1
            continue
        inside = incircle_many(a, b, c, pts)
        inside[[i, j, m]] = 0
        violations.extend((k, int(s)) for s in np.flatnonzero(inside > 0))
    hull_area = polygon_area(convex_hull(pts).vertex_array)
    area_ok = abs(area_sum - hull_area) <= rel_tol * max(hull_area, 1e-300)
    return CertificateReport(
        triangles=len(diagram.triangles),
        empty_circle_ok=not violations,
        empty_circle_violations=violations,
        degenerate_triangles=degenerate,
        area_sum=area_sum,
        hull_area=hull_area,
        area_ok=bool(area_ok),
        edges_ok=bool(np.all(diagram.locally_delaunay)),
    )


class EmptyCircle(BaseModel):
    """Triangle of sites whose hull contains y and whose circumcircle is empty"""
    model_config = ConfigDict(frozen=True)

    triple: Tuple[int, int, int]
    center: Tuple[float, float]
    radius: float


def _containing_triangles(diagram: DelaunayDiagram, y: np.ndarray) -> List[int]:
    tri = diagram.sites[diagram.triangles]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]

    def side(u, v):
        return (u[:, 0] - y[0]) * (v[:, 1] - y[1]) - (u[:, 1] - y[1]) * (v[:, 0] - y[0])

    scale = np.max(np.abs(tri)) ** 2 + float(np.max(np.abs(y))) ** 2 + 1.0
    slack = 1e-12 * scale
    near = np.flatnonzero((side(a, b) >= -slack) & (side(b, c) >= -slack) & (side(c, a) >= -slack))
    return [int(k) for k in near
            if all(orient2d(u, v, y) >= 0 for u, v in ((tri[k, 0], tri[k, 1]), (tri[k, 1], tri[k, 2]), (tri[k, 2], tri[k, 0])))]


def locate_empty_circle(y, sites=None, diagram: Optional[DelaunayDiagram] = None,
                        perturb: bool = False) -> EmptyCircle:
    """Sites x_i, x_j, x_l with y in their hull and an empty circumcircle"""
    if diagram is None:
        if sites is None:
            raise ValueError("pass sites or a diagram")
        diagram = triangulate(sites, perturb=perturb)
    y = as_point(y, 2)
    if convex_hull(diagram.sites).distance_to(y) > 0:
        raise OutsideHull(f"{y.tolist()} is outside the convex hull of the sites")
    for k in _containing_triangles(diagram, y):
        if np.isnan(diagram.radii[k]):
            continue
        return EmptyCircle(
            triple=tuple(int(v) for v in diagram.triangles[k]),
            center=tuple(float(v) for v in diagram.centers[k]),
            radius=float(diagram.radii[k]),
        )
    raise OutsideHull(f"no non-degenerate triangle contains {y.tolist()}")


def general_position_check(sites) -> List[Tuple[int, ...]]:
    """
    Every collinear triple and co-circular quadruple of the sites

    Each non-collinear triple is tested against all later sites with the
    exact in-circle predicate, so no tolerance decides a degeneracy.
    """
    pts = as_points(sites, 2)
    n = len(pts)
    _check_duplicates(pts)
    triples, quads = set(), set()
    for i, j in combinations(range(n), 2):
        rest = np.arange(j + 1, n)
        if not len(rest):
            continue
        turns = orient2d_many(pts[i], pts[j], pts[rest])
        triples.update((i, j, int(k)) for k in rest[turns == 0])
        for k, turn in zip(rest, turns):
            later = np.arange(k + 1, n)
            if turn == 0 or not len(later):
                continue
            a, b = (i, j) if turn > 0 else (j, i)
            on_circle = incircle_many(pts[a], pts[b], pts[k], pts[later]) == 0
            quads.update((i, j, int(k), int(l)) for l in later[on_circle])
    return sorted(triples) + sorted(quads)
