#!/usr/bin/env python3
"""
Certified sampling of fibers f^{-1}(b)

Scalar fibers are located by sign changes along the grid lines, followed
by bisection. Along each grid line, nodes where |f - b| has a local minimum
without a sign change get their two adjacent edges subdivided, which
recovers pairs of nearby roots and (with touch_tol) tangential zeros.
Fibers of maps into R^2 are isolated points and are found with fsolve
started from the residual minima of the grid.
"""

import logging
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.ndimage import minimum_filter
from scipy.optimize import fsolve
from scipy.spatial import cKDTree

import config
from errors import EmptyInput, InfeasibleFidelity, UnknownFamily
from sets import GridWindow, SampledSet

logger = logging.getLogger(__name__)

Func = Callable[[np.ndarray], np.ndarray]


def _bisect(func: Func, level, a: np.ndarray, b: np.ndarray, ga: np.ndarray, tol: float) -> np.ndarray:
    """Bisect bracketing segments [a, b] down to width tol; returns the midpoints"""
    if len(a) == 0:
        return np.empty((0, a.shape[-1]))
    neg = np.where((ga < 0)[:, None], a, b)
    pos = np.where((ga < 0)[:, None], b, a)
    width = float(np.max(np.linalg.norm(pos - neg, axis=1)))
    for _ in range(max(0, int(np.ceil(np.log2(max(width / tol, 1.0)))))):
        mid = 0.5 * (neg + pos)
        below = (func(mid) - level) < 0
        neg = np.where(below[:, None], mid, neg)
        pos = np.where(below[:, None], pos, mid)
    return 0.5 * (neg + pos)


def _refine_edges(func: Func, level, starts: np.ndarray, ends: np.ndarray, refine: int,
                  tol: float, touch_tol: Optional[float]) -> np.ndarray:
    """Subdivide edges, bracket any sign change in the pieces, keep touch points"""
    if len(starts) == 0:
        return np.empty((0, starts.shape[-1]))
    t = np.linspace(0.0, 1.0, refine + 1)[None, :, None]
    sub = starts[:, None, :] + t * (ends - starts)[:, None, :]
    gs = func(sub) - level
    flip = np.sign(gs[:, :-1]) * np.sign(gs[:, 1:]) < 0
    found = [_bisect(func, level, sub[:, :-1][flip], sub[:, 1:][flip], gs[:, :-1][flip], tol)]
    found.append(sub[gs == 0])
    if touch_tol is not None:
        best = np.argmin(np.abs(gs), axis=1)
        rows = np.arange(len(sub))
        close = np.abs(gs[rows, best]) <= touch_tol
        found.append(sub[rows, best][close])
    return np.vstack(found)


def _roots_along(func: Func, level, grid: np.ndarray, g: np.ndarray, axis: int, tol: float,
                 refine: int, touch_tol: Optional[float]) -> np.ndarray:
    P = np.moveaxis(grid, axis, 0)
    G = np.moveaxis(g, axis, 0)
    flip = np.sign(G[:-1]) * np.sign(G[1:]) < 0
    found = [_bisect(func, level, P[:-1][flip], P[1:][flip], G[:-1][flip], tol)]

    if refine > 1 and G.shape[0] >= 3:
        mid = np.abs(G[1:-1])
        same = (np.sign(G[:-2]) == np.sign(G[1:-1])) & (np.sign(G[1:-1]) == np.sign(G[2:]))
        valley = same & (mid <= np.abs(G[:-2])) & (mid <= np.abs(G[2:])) & (G[1:-1] != 0)
        starts = np.concatenate([P[:-2][valley], P[1:-1][valley]])
        ends = np.concatenate([P[1:-1][valley], P[2:][valley]])
        found.append(_refine_edges(func, level, starts, ends, refine, tol, touch_tol))
    return np.vstack(found)


def sample_level_set(func: Func, level: float, window: GridWindow, eps: float, refine: int = 16,
                     touch_tol: Optional[float] = None, step: Optional[float] = None,
                     label: str = "") -> SampledSet:
    """
    Sample the fiber {func = level} on the window (dimension 1 or 2)

    func takes an (..., p) array and returns the (...) array of values.
    Grid spacing defaults to eps / 2 and roots are bisected to eps / 2.
    """
    if window.dim > 2:
        raise ValueError("level sets are sampled in dimension 1 or 2")
    step = eps / 2.0 if step is None else step
    if eps < config.MIN_RESOLVABLE_EPS:
        raise InfeasibleFidelity(f"eps={eps} is below the resolvable limit")
    if window.node_count(step) > config.MAX_SAMPLES:
        raise InfeasibleFidelity(f"fiber grid of {window.node_count(step)} nodes exceeds MAX_SAMPLES")

    axes = [window.axis_nodes(k, step) for k in range(window.dim)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    g = func(grid) - level
    if not np.all(np.isfinite(g)):
        raise ValueError("function is not finite on the window")

    found = [grid[g == 0]]
    if touch_tol is not None:
        found.append(grid[np.abs(g) <= touch_tol])
    for axis in range(window.dim):
        found.append(_roots_along(func, level, grid, g, axis, eps / 2.0, refine, touch_tol))
    points = np.vstack(found)
    if len(points) == 0:
        raise EmptyInput(f"fiber at level {level} is empty on the window")
    logger.debug(f"fiber {label or level}: {len(points)} samples")
    return SampledSet(points=points, eps=eps, window=window, label=label or f"fiber[{level:g}]")


def solve_level_points(func: Func, level, window: GridWindow, eps: float, label: str = "") -> SampledSet:
    """Isolated fiber points of a map R^2 -> R^2, found by fsolve from grid residual minima"""
    level = np.asarray(level, dtype=float)
    nodes = [window.axis_nodes(k) for k in range(window.dim)]
    grid = np.stack(np.meshgrid(*nodes, indexing="ij"), axis=-1)
    residual = np.linalg.norm(func(grid) - level, axis=-1)
    seeds = grid[(residual == minimum_filter(residual, size=3, mode="nearest"))]

    roots = []
    for seed in seeds:
        root, info, ier, _ = fsolve(lambda z: func(z) - level, seed, full_output=True)
        if ier == 1 and np.linalg.norm(info["fvec"]) < 1e-9 and window.contains(root[None, :])[0]:
            roots.append(root)
    if not roots:
        raise EmptyInput(f"no fiber points at level {level.tolist()} on the window")
    roots = np.asarray(roots)

    # merge duplicates found from neighbouring seeds
    keep = np.ones(len(roots), dtype=bool)
    for i, j in sorted(cKDTree(roots).query_pairs(eps / 2.0)):
        if keep[i]:
            keep[j] = False
    return SampledSet(points=roots[keep], eps=eps, window=window, label=label or "fiber points")


def gradient_lower_bound(func: Func, points: np.ndarray, step: float) -> float:
    """Smallest central-difference gradient norm over the points"""
    points = np.asarray(points, dtype=float)
    columns = []
    for k in range(points.shape[1]):
        e = np.zeros(points.shape[1])
        e[k] = step
        columns.append((func(points + e) - func(points - e)) / (2 * step))
    return float(np.min(np.linalg.norm(np.column_stack(columns), axis=1)))


def jacobian_fd(func: Func, points: np.ndarray, step: float) -> np.ndarray:
    """Central-difference Jacobians, shape (N, q, p)"""
    points = np.asarray(points, dtype=float)
    columns = []
    for k in range(points.shape[1]):
        e = np.zeros(points.shape[1])
        e[k] = step
        diff = (func(points + e) - func(points - e)) / (2 * step)
        columns.append(diff.reshape(len(points), -1))
    return np.stack(columns, axis=-1)


def operator_norm_deviation(J1: np.ndarray, J2: np.ndarray) -> float:
    """sup over points of the spectral norm of J1 - J2"""
    return float(np.max(np.linalg.norm(J1 - J2, ord=2, axis=(1, 2))))


# ---------------------------------------------------------------------------
# The cubic fiber counterexample f(x, y) = x (x - y)^2
# ---------------------------------------------------------------------------

def cubic_fiber_function(z: np.ndarray) -> np.ndarray:
    x, y = z[..., 0], z[..., 1]
    return x * (x - y) ** 2


def fiber_zero_branches(window: GridWindow, eps: float) -> Dict[str, np.ndarray]:
    """The zero set {x = 0} u {y = x}, sampled along its three branches"""
    lo = min(window.lo) - eps
    hi = max(window.hi) + eps
    count = int(np.ceil((hi - lo) / eps))
    t = np.linspace(lo, hi, count + 1)
    neg, pos = t[t < 0], t[t > 0]
    return {
        "vertical": np.column_stack([np.zeros_like(t), t]),
        "diagonal_negative": np.column_stack([neg, neg]),
        "diagonal_positive": np.column_stack([pos, pos]),
    }


def fiber_zero_set(window: GridWindow, eps: float) -> np.ndarray:
    branches = fiber_zero_branches(window, eps)
    points = np.vstack(list(branches.values()) + [np.zeros((1, 2))])
    return points[window.contains(points, eps)]


# ---------------------------------------------------------------------------
# Function families for the level-set suites
# ---------------------------------------------------------------------------

class LevelFamily(BaseModel):
    """Sequence f_n -> f with a chosen level b"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str = Field(..., description="Family identifier")
    source_dim: int = Field(..., ge=1, le=2, description="p")
    target_dim: int = Field(..., ge=1, le=2, description="q")
    limit: Callable[[np.ndarray], np.ndarray] = Field(..., description="f, vectorized over (..., p)")
    member: Callable[[np.ndarray, int], np.ndarray] = Field(..., description="(z, n) -> f_n(z)")
    level: Tuple[float, ...] = Field(..., description="Default level b")
    window: Tuple[Tuple[float, ...], Tuple[float, ...]] = Field(..., description="Default window corners")
    smooth: bool = Field(True, description="Whether every f_n is C1 (needed by the derivative suite)")

    def at(self, n: int) -> Func:
        return lambda z: self.member(z, n)


def _sign(n: int) -> float:
    return 1.0 if n % 2 == 0 else -1.0


LEVEL_FAMILIES: Dict[str, LevelFamily] = {
    family.name: family for family in [
        LevelFamily(
            name="quadratic-1d", source_dim=1, target_dim=1,
            limit=lambda z: z[..., 0] ** 2 - 1.0,
            member=lambda z, n: z[..., 0] ** 2 - 1.0 + 1.0 / n,
            level=(0.0,), window=((-2.0,), (2.0,)),
        ),
        LevelFamily(
            name="circle-2d", source_dim=2, target_dim=1,
            limit=lambda z: z[..., 0] ** 2 + z[..., 1] ** 2 - 1.0,
            member=lambda z, n: z[..., 0] ** 2 + z[..., 1] ** 2 - 1.0 + _sign(n) / n,
            level=(0.0,), window=((-2.0, -2.0), (2.0, 2.0)),
        ),
        LevelFamily(
            name="square-1d", source_dim=1, target_dim=1,
            limit=lambda z: z[..., 0] ** 2,
            member=lambda z, n: z[..., 0] ** 2 - 1.0 / n ** 2,
            level=(0.0,), window=((-2.0,), (2.0,)),
        ),
        LevelFamily(
            name="wiggle-1d", source_dim=1, target_dim=1,
            limit=lambda z: z[..., 0],
            member=lambda z, n: z[..., 0] + np.sin(n * z[..., 0]) / n,
            level=(0.0,), window=((-1.0,), (1.0,)),
        ),
        LevelFamily(
            name="parabola-shift", source_dim=2, target_dim=1,
            limit=lambda z: z[..., 1] - z[..., 0] ** 2,
            member=lambda z, n: z[..., 1] - z[..., 0] ** 2 + z[..., 0] / n,
            level=(0.0,), window=((-1.0, -1.0), (1.0, 1.0)),
        ),
        LevelFamily(
            name="linear-shift", source_dim=1, target_dim=1,
            limit=lambda z: z[..., 0],
            member=lambda z, n: z[..., 0] + 1.0 / n,
            level=(0.0,), window=((-1.0,), (1.0,)),
        ),
        LevelFamily(
            name="constant", source_dim=2, target_dim=1,
            limit=lambda z: z[..., 0] + z[..., 1],
            member=lambda z, n: z[..., 0] + z[..., 1],
            level=(0.0,), window=((-1.0, -1.0), (1.0, 1.0)),
        ),
        LevelFamily(
            name="parabola-pair-2d", source_dim=2, target_dim=2,
            limit=lambda z: np.stack([z[..., 0] ** 2 - z[..., 1], z[..., 1] - 0.25], axis=-1),
            member=lambda z, n: np.stack([z[..., 0] ** 2 - z[..., 1] - 1.0 / n, z[..., 1] - 0.25], axis=-1),
            level=(0.0, 0.0), window=((-1.0, -1.0), (1.0, 1.0)),
        ),
    ]
}


def get_level_family(name: str) -> LevelFamily:
    key = str(name).strip().lower().replace("_", "-")
    if key not in LEVEL_FAMILIES:
        raise UnknownFamily(f"unknown function family '{name}'")
    return LEVEL_FAMILIES[key]


def sample_fiber(func: Func, level: Tuple[float, ...], window: GridWindow, eps: float,
                 target_dim: int = 1, touch_tol: Optional[float] = None, step: Optional[float] = None,
                 label: str = "") -> SampledSet:
    """Dispatch on the target dimension"""
    if target_dim == 1:
        return sample_level_set(func, level[0], window, eps, touch_tol=touch_tol, step=step, label=label)
    return solve_level_points(func, level, window, eps, label=label)
