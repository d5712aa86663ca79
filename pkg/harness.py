#!/usr/bin/env python3
"""
Convergence experiments

Each suite turns a convergence statement into a falsifiable numerical
experiment over the corpus families and returns a ConvergenceReport with
a verdict. Also home of the finite-universe subsequence extractor
(Zarankiewicz) and of the cubic fiber counterexample.
"""

import logging
from enum import Enum
from typing import Any, Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial import cKDTree

import config
from delaunay import locate_empty_circle, triangulate
from errors import (
    DerivativeDivergence,
    GeneralPositionViolation,
    HypothesisFailed,
    NotConvex,
    NotRegularValue,
    UnknownFamily,
    ZeroLevel,
)
from geom import ConvexPolytope, hausdorff, is_convex_polygon, polytope_hausdorff
from level_sets import (
    LevelFamily,
    cubic_fiber_function,
    fiber_zero_branches,
    fiber_zero_set,
    get_level_family,
    gradient_lower_bound,
    jacobian_fd,
    operator_norm_deviation,
    sample_fiber,
    sample_level_set,
)
from multifun import (
    graph_from_boxes,
    graph_from_values,
    graph_window,
    graphical_defects,
    pointwise_defect,
    subdiff_graph_of_pl,
)
from sets import (
    BOUNDARY_OF,
    DefectPair,
    Family,
    GridWindow,
    SampledSet,
    converges,
    convex_hull_sample,
    default_margin,
    diverges,
    family_dimensions,
    hull_boundary_sample,
    kuratowski_defects,
    limit_family,
    make_family,
    regular_polygon,
)
from subdiff import (
    PLFamily,
    build_pl_family,
    clarke_dist,
    clarke_sq_dist,
    dist_subdifferential_table,
    pl_family_spec,
    pl_subdifferential,
    sawtooth,
    sq_dist_subdifferential_table,
)

logger = logging.getLogger(__name__)


class Verdict(str, Enum):
    CONVERGES = "CONVERGES"
    DIVERGES = "DIVERGES"
    INCONCLUSIVE = "INCONCLUSIVE"


class ConvergenceReport(BaseModel):
    """Outcome of one experiment"""
    model_config = ConfigDict(frozen=True)

    experiment_id: str = Field(..., description="Experiment identifier")
    n_list: List[int] = Field(default_factory=list, description="Sequence indices used")
    defect_series: List[Union[DefectPair, float]] = Field(default_factory=list,
                                                          description="Defect pairs or scalar deviations, one per index")
    tolerance: float = Field(..., gt=0)
    verdict: Verdict
    expected: Optional[Verdict] = Field(None, description="Verdict the catalogue expects, if any")
    notes: List[str] = Field(default_factory=list)
    checks: Dict[str, float] = Field(default_factory=dict, description="Named scalar measurements")
    aux_series: Dict[str, List[float]] = Field(default_factory=dict, description="Secondary series per index")
    parameters: Dict[str, Any] = Field(default_factory=dict)

    @property
    def final_defect(self) -> Optional[float]:
        if not self.defect_series:
            return None
        last = self.defect_series[-1]
        return last.value if isinstance(last, DefectPair) else float(last)

    @property
    def unexpected(self) -> bool:
        """DIVERGES where the catalogue expects CONVERGES"""
        return self.expected == Verdict.CONVERGES and self.verdict == Verdict.DIVERGES


def judge(series: Sequence[Union[DefectPair, float]], tol: float, n_list: Optional[Sequence[int]] = None) -> Verdict:
    if converges(series, tol, n_list):
        return Verdict.CONVERGES
    if diverges(series, tol):
        return Verdict.DIVERGES
    return Verdict.INCONCLUSIVE


def _interval_defects(slice_: Tuple[float, float], value: Tuple[float, float]) -> DefectPair:
    """Exact defects between two intervals: slice_ as the n-th set, value as the limit"""
    (s_lo, s_hi), (v_lo, v_hi) = slice_, value
    lower = max(0.0, s_lo - v_lo, v_hi - s_hi)
    upper = max(0.0, v_lo - s_lo, s_hi - v_hi)
    return DefectPair(lower_defect=lower, upper_defect=upper)


def _default_window(family: Family, grid_h: float) -> GridWindow:
    return GridWindow.cube(family_dimensions(family)[0], -1.0, 1.0, grid_h)


# ---------------------------------------------------------------------------
# Squared distance and distance
# ---------------------------------------------------------------------------

def verify_sq_dist_convergence(family_id=Family.PAPER_X_N, n_list: Optional[Sequence[int]] = None,
                               window: Optional[GridWindow] = None, grid_h: float = config.DEFAULT_GRID_H,
                               tol: float = config.DEFAULT_TOL, eps: float = config.DEFAULT_EPS) -> ConvergenceReport:
    """Graphs of the Clarke subdifferential of dist^2 to X_n against the one for the limit set"""
    family = Family.parse(family_id)
    n_list = list(n_list or config.DEFAULT_N_LIST)
    experiment_id = f"sq-dist:{family.value}"
    window = window or _default_window(family, grid_h)
    parameters = {"family": family.value, "grid_h": grid_h, "eps": eps, "window_lo": list(window.lo),
                  "window_hi": list(window.hi)}

    if window.dim >= 3:
        return ConvergenceReport(
            experiment_id=experiment_id, n_list=n_list, tolerance=tol, verdict=Verdict.INCONCLUSIVE,
            notes=["dimension 3: the graphical convergence of dist^2 subdifferentials is open; no verdict"],
            parameters=parameters,
        )

    proj_tol = 2.0 * eps
    sources = window.nodes(grid_h)
    limit = limit_family(family, window, eps)
    limit_values = [clarke_sq_dist(limit, x, proj_tol) for x in sources]
    member_values = [[clarke_sq_dist(S, x, proj_tol) for x in sources]
                     for S in (make_family(family, n, window, eps) for n in n_list)]

    band = max([1.0] + [float(np.max(np.abs(V.vertex_array))) for values in member_values + [limit_values]
                        for V in values])
    gwindow = graph_window(window.lo, window.hi, band, grid_h, target_dim=window.dim)
    G_lim = graph_from_values(sources, limit_values, grid_h, gwindow, label="sq-dist limit")

    series = []
    for n, values in zip(n_list, member_values):
        G_n = graph_from_values(sources, values, grid_h, gwindow, label=f"sq-dist [{n}]")
        series.append(graphical_defects(G_n, G_lim))
        logger.debug(f"{experiment_id} n={n}: {series[-1].value:.5f}")

    checks = {}
    if family == Family.PAPER_X_N and window.dim == 1:
        # sampled subdifferentials against the closed form, node by node
        checks["sq_dist_table_deviation"] = max(
            polytope_hausdorff(V, ConvexPolytope.interval(*sq_dist_subdifferential_table(n, float(x[0]))))
            for n, values in zip(n_list, member_values) for x, V in zip(sources, values)
        )

    return ConvergenceReport(
        experiment_id=experiment_id, n_list=n_list, defect_series=series, tolerance=tol,
        verdict=judge(series, tol, n_list),
        notes=[f"projection tolerance {proj_tol:g}", f"graph band +-{band:g}",
               f"margin {default_margin(G_lim.as_sampled_set()):g}"],
        checks=checks, parameters=parameters,
    )


def dist_counterexample_boxes(n: int) -> List[Tuple[Tuple[float, float], Tuple[float, float]]]:
    """Graph of the Clarke subdifferential of dist to R \\ (-1/n, 1/n) on [-1, 1]"""
    r = 1.0 / n
    return [
        ((-1.0, -r), (0.0, 0.0)),
        ((r, 1.0), (0.0, 0.0)),
        ((-r, -r), (0.0, 1.0)),
        ((r, r), (-1.0, 0.0)),
        ((-r, 0.0), (1.0, 1.0)),
        ((0.0, r), (-1.0, -1.0)),
        ((0.0, 0.0), (-1.0, 1.0)),
    ]


def verify_dist_counterexample(n_list: Optional[Sequence[int]] = None, window: Optional[GridWindow] = None,
                               grid_h: float = config.DEFAULT_GRID_H,
                               tol: float = config.DEFAULT_TOL, against: str = "real-line") -> ConvergenceReport:
    """
    Closed-form subdifferential graphs of dist to X_n against a limit graph

    against="real-line" compares with the subdifferential of dist to R (the
    zero map) and must diverge; against="jump" compares with the map equal
    to [-1, 1] at 0 and {0} elsewhere, which is the actual graphical limit.
    window is the 2-D graph window; the default spans [-1, 1] with a padded value band.
    """
    n_list = list(n_list or config.COUNTEREXAMPLE_N_LIST)
    if against not in ("real-line", "jump"):
        raise ValueError(f"unknown comparison '{against}'")
    window = window or graph_window((-1.0,), (1.0,), 1.0, grid_h)
    limit_boxes = [((-1.0, 1.0), (0.0, 0.0))]
    if against == "jump":
        limit_boxes.append(((0.0, 0.0), (-1.0, 1.0)))
    G_lim = graph_from_boxes(limit_boxes, grid_h, window, label=f"dist limit ({against})")

    series = []
    G_n = None
    for n in n_list:
        G_n = graph_from_boxes(dist_counterexample_boxes(n), grid_h, window, label=f"dist [{n}]")
        series.append(graphical_defects(G_n, G_lim))

    witness = pointwise_defect(G_n, 0.0, ConvexPolytope.singleton([0.0])).upper_defect
    verdict = judge(series, tol, n_list)
    notes = []
    if verdict == Verdict.DIVERGES:
        notes.append(f"point (0, 1) lies on every graph; slice at 0 stays {witness:.3f} from the limit value")
    return ConvergenceReport(
        experiment_id=f"dist-counterexample:{against}", n_list=n_list, defect_series=series, tolerance=tol,
        verdict=verdict, notes=notes,
        checks={"slice_defect_at_0": witness, "dist_table_deviation": dist_table_deviation(n_list[-1])},
        parameters={"grid_h": grid_h, "against": against},
    )


def dist_table_deviation(n: int, eps: float = config.DEFAULT_EPS) -> float:
    """
    Largest endpoint gap between the sampled and the closed-form dist subdifferential

    Evaluated off the sampled X_n at 0 and at +-1/(2n), where the sample
    Clarke subdifferential is defined; the boxes above encode the same table.
    eps is tightened to 1/(8n) when the gap around 0 is narrower than that.
    """
    r = 1.0 / n
    eps = min(eps, r / 8)
    S = make_family(Family.PAPER_X_N, n, GridWindow.cube(1, -1.0, 1.0, config.DEFAULT_GRID_H), eps)
    gap = 0.0
    for x in (-r / 2, 0.0, r / 2):
        V = clarke_dist(S, [x], 2.0 * eps)
        lo, hi = dist_subdifferential_table(n, x)
        gap = max(gap, abs(V.lo - lo), abs(V.hi - hi))
    logger.debug(f"dist table n={n}: endpoint gap {gap:.2e}")
    return gap


# ---------------------------------------------------------------------------
# Lipschitz sequences of one variable
# ---------------------------------------------------------------------------

def verify_lipschitz_theorem(pl_family_id=PLFamily.ABS_SHRINK, n_list: Optional[Sequence[int]] = None,
                             tol: float = config.DEFAULT_TOL, grid_h: float = config.DEFAULT_GRID_H) -> ConvergenceReport:
    """
    Graphical convergence of the subdifferentials and its conclusion

    The hypothesis is a graphical limit that is univalued off a finite set
    and bounded; the conclusion is uniform convergence to a limit whose
    subdifferential matches the limit slices off that set.
    """
    spec = pl_family_spec(pl_family_id)
    family = spec.family
    n_list = list(n_list or config.DEFAULT_N_LIST)
    members = [build_pl_family(family, n) for n in n_list]
    lipschitz = [f.lipschitz for f in members]
    finite = [abs(v) for _, yr in spec.limit_boxes for v in yr if np.isfinite(v)]
    band = max([1.0] + finite + lipschitz)

    window = graph_window((-1.0,), (1.0,), band, grid_h)
    G_lim = graph_from_boxes(spec.limit_boxes, grid_h, window, band=band, label=f"{family.value} limit")
    series = [graphical_defects(subdiff_graph_of_pl(f, grid_h, band=band, label=f"{family.value} [{n}]"), G_lim)
              for n, f in zip(n_list, members)]

    notes = []
    if G_lim.truncated:
        notes.append(f"limit graph truncated at +-{band:g}")
    checks = {"lipschitz_max": float(max(lipschitz))}
    report = dict(experiment_id=f"lipschitz:{family.value}", n_list=n_list, defect_series=series,
                  tolerance=tol, checks=checks, parameters={"family": family.value, "grid_h": grid_h})
    try:
        if not spec.bounded:
            raise HypothesisFailed("limit graph is unbounded: no common Lipschitz constant")
        if not spec.ae_univalued:
            raise HypothesisFailed("limit not a.e. univalued")
    except HypothesisFailed as e:
        logger.info(f"lipschitz:{family.value}: hypothesis fails ({e})")
        # the graphs are still measured; only the conclusion is withheld
        settled = converges(series, tol, n_list)
        checks["graphs_converge"] = float(settled)
        checks["graph_defect_final"] = float(series[-1].value)
        if settled:
            notes.append(f"graphs converge anyway (final defect {series[-1].value:.4f})")
        else:
            notes.append(f"graphs do not settle (final defect {series[-1].value:.4f})")
        return ConvergenceReport(verdict=Verdict.INCONCLUSIVE, notes=notes + [str(e)], **report)

    sup_series = [f.sup_distance(spec.limit) for f in members]
    exceptional = {xr[0] for xr, yr in spec.limit_boxes if xr[0] == xr[1] and yr[1] > yr[0]}
    sample_xs = [x for x in np.linspace(-1.0, 1.0, 41)
                 if x not in exceptional and x not in spec.limit.breakpoints]
    mismatches = 0
    for x in sample_xs:
        lo, hi = spec.limit_slice(x)
        D = pl_subdifferential(spec.limit, x)
        if abs(D.lo - lo) > 1e-12 or abs(D.hi - hi) > 1e-12:
            mismatches += 1
    for x in sorted(exceptional):
        if pl_subdifferential(spec.limit, x).lo != spec.limit_slice(x)[0]:
            notes.append(f"D({x:g}) = [{spec.limit_slice(x)[0]:g}, {spec.limit_slice(x)[1]:g}] differs from the "
                         f"subdifferential of the limit")
    checks["slice_mismatches"] = float(mismatches)
    checks["sup_norm_final"] = float(sup_series[-1])

    if converges(series, tol, n_list) and converges(sup_series, tol, n_list) and mismatches == 0:
        verdict = Verdict.CONVERGES
    elif diverges(series, tol) or diverges(sup_series, tol):
        verdict = Verdict.DIVERGES
    else:
        verdict = Verdict.INCONCLUSIVE
    return ConvergenceReport(verdict=verdict, notes=notes, aux_series={"sup_norm": sup_series}, **report)


def verify_sawtooth_pointwise(x: float = 0.5, n_list: Optional[Sequence[int]] = None,
                              tol: float = config.DEFAULT_TOL) -> ConvergenceReport:
    """Exact slices of the sawtooth subdifferentials at x against the graphical limit value [-1, 1]"""
    n_list = list(n_list or range(2, 22))
    series = []
    for n in n_list:
        D = pl_subdifferential(sawtooth(n), x)
        series.append(_interval_defects((D.lo, D.hi), (-1.0, 1.0)))
    tail = [d.value for d in series[len(series) // 2:]]
    oscillates = min(tail) <= tol and max(tail) >= 2.0 * tol
    verdict = Verdict.DIVERGES if oscillates or diverges(series, tol) else judge(series, tol, n_list)
    notes = ["slices oscillate between a singleton and [-1, 1]"] if oscillates else []
    return ConvergenceReport(
        experiment_id=f"sawtooth-pointwise:{x:g}", n_list=n_list, defect_series=series, tolerance=tol,
        verdict=verdict, notes=notes, parameters={"x": x},
    )


def verify_spike_unbounded(radii: Sequence[float] = (1.0, 5.0, 10.0), n_list: Optional[Sequence[int]] = None,
                           tol: float = config.DEFAULT_TOL) -> ConvergenceReport:
    """Slices at 0 of the spike subdifferentials against bands [-R, R]: the excess grows past every R"""
    n_list = list(n_list or config.DEFAULT_N_LIST)
    slices = [pl_subdifferential(build_pl_family(PLFamily.SPIKE, n), 0.0) for n in n_list]
    aux, checks, unbounded = {}, {}, True
    series = []
    for R in radii:
        defects = [_interval_defects((D.lo, D.hi), (-R, R)) for D in slices]
        aux[f"excess_R{R:g}"] = [d.upper_defect for d in defects]
        checks[f"excess_R{R:g}_final"] = defects[-1].upper_defect
        unbounded &= defects[-1].upper_defect > R
        series = defects
    notes = ["limit value at 0 is the whole line"] if unbounded else []
    return ConvergenceReport(
        experiment_id="spike-unbounded", n_list=n_list, defect_series=series, tolerance=tol,
        verdict=Verdict.DIVERGES if unbounded else judge(series, tol, n_list),
        notes=notes, checks=checks, aux_series=aux, parameters={"radii": list(radii)},
    )


# ---------------------------------------------------------------------------
# Level sets
# ---------------------------------------------------------------------------

def _fiber_eps(window: GridWindow, grid_h: float, eps: Optional[float]) -> float:
    if eps is not None:
        return eps
    return config.DEFAULT_EPS if window.dim == 1 else 2.0 * grid_h


def _regular_bound(func, points: np.ndarray, step: float, target_dim: int) -> float:
    if target_dim == 1:
        return gradient_lower_bound(func, points, step)
    J = jacobian_fd(func, points, step)
    return float(np.min(np.linalg.svd(J, compute_uv=False)[:, -1]))


def check_regular_value(fam: LevelFamily, level: Tuple[float, ...], window: GridWindow, eps: float,
                        grid_h: float) -> Tuple[SampledSet, float]:
    """Sample the limit fiber (tangential zeros included) and bound the gradient on it from below"""
    step = eps / 2.0
    fiber = sample_fiber(fam.limit, level, window, eps, fam.target_dim, touch_tol=step ** 2,
                         label=f"{fam.name} limit fiber")
    delta = _regular_bound(fam.limit, fiber.points, grid_h / 4.0, fam.target_dim)
    if delta < config.REGULAR_VALUE_MIN_GRADIENT:
        raise NotRegularValue(f"{list(level)} is not a regular value of the {fam.name} limit "
                              f"(gradient bound {delta:.3g})", gradient_bound=delta)
    return fiber, delta


def _fiber_series(fam: LevelFamily, level, n_list, window: GridWindow, eps: float,
                  limit_fiber: SampledSet) -> List[DefectPair]:
    series = []
    for n in n_list:
        fiber = sample_fiber(fam.at(n), level, window, eps, fam.target_dim, label=f"{fam.name} [{n}]")
        series.append(kuratowski_defects(fiber, limit_fiber))
    return series


def verify_level_sets(function_family_id: str = "quadratic-1d", b: Optional[float] = None,
                      n_list: Optional[Sequence[int]] = None, window: Optional[GridWindow] = None,
                      grid_h: float = config.DEFAULT_GRID_H, tol: float = config.DEFAULT_TOL,
                      eps: Optional[float] = None) -> ConvergenceReport:
    """Fibers of f_n -> f at a regular value b of f"""
    fam = get_level_family(function_family_id)
    if fam.target_dim != 1:
        raise UnknownFamily(f"{fam.name} is vector valued; use the derivative suite")
    level = fam.level if b is None else (float(b),)
    n_list = list(n_list or config.DEFAULT_N_LIST)
    window = window or GridWindow.from_corners(fam.window, grid_h)
    eps = _fiber_eps(window, grid_h, eps)

    limit_fiber, delta = check_regular_value(fam, level, window, eps, grid_h)
    series = _fiber_series(fam, level, n_list, window, eps, limit_fiber)
    return ConvergenceReport(
        experiment_id=f"level-sets:{fam.name}", n_list=n_list, defect_series=series, tolerance=tol,
        verdict=judge(series, tol, n_list), checks={"gradient_bound": delta},
        notes=[f"fiber eps {eps:g}"],
        parameters={"family": fam.name, "level": list(level), "grid_h": grid_h, "eps": eps},
    )


def verify_level_sets_c1(vector_family_id: str = "parabola-shift", b: Optional[Sequence[float]] = None,
                         n_list: Optional[Sequence[int]] = None, window: Optional[GridWindow] = None,
                         grid_h: float = config.DEFAULT_GRID_H, tol: float = config.DEFAULT_TOL,
                         eps: Optional[float] = None) -> ConvergenceReport:
    """Fibers of C1 maps with f_n' -> f' uniformly on the window"""
    fam = get_level_family(vector_family_id)
    if fam.target_dim > fam.source_dim:
        raise ValueError(f"{fam.name}: target dimension exceeds source dimension")
    level = fam.level if b is None else tuple(float(v) for v in b)
    n_list = list(n_list or config.DEFAULT_N_LIST)
    window = window or GridWindow.from_corners(fam.window, grid_h)
    eps = _fiber_eps(window, grid_h, eps)
    report = dict(experiment_id=f"level-sets-c1:{fam.name}", n_list=n_list, tolerance=tol,
                  parameters={"family": fam.name, "level": list(level), "grid_h": grid_h, "eps": eps})

    if not fam.smooth:
        return ConvergenceReport(verdict=Verdict.INCONCLUSIVE, notes=["members are not C1"], **report)

    nodes = window.nodes(grid_h)
    step = grid_h / 4.0
    J = jacobian_fd(fam.limit, nodes, step)
    deviations = [operator_norm_deviation(jacobian_fd(fam.at(n), nodes, step), J) for n in n_list]
    if not converges(deviations, tol, n_list):
        raise DerivativeDivergence(f"{fam.name}: Jacobian deviation {deviations[-1]:.3g} does not decrease to {tol}")

    limit_fiber, delta = check_regular_value(fam, level, window, eps, grid_h)
    series = _fiber_series(fam, level, n_list, window, eps, limit_fiber)
    return ConvergenceReport(
        verdict=judge(series, tol, n_list), defect_series=series,
        checks={"gradient_bound": delta, "jacobian_deviation_final": deviations[-1]},
        aux_series={"jacobian_deviation": deviations}, notes=[f"fiber eps {eps:g}"], **report,
    )


# ---------------------------------------------------------------------------
# Convex sets and their boundaries
# ---------------------------------------------------------------------------

def verify_convex_boundary(polygon_family_id=Family.NGON, n_list: Optional[Sequence[int]] = None,
                           tol: float = config.DEFAULT_TOL, window: Optional[GridWindow] = None,
                           eps: float = config.DEFAULT_REGION_EPS) -> ConvergenceReport:
    """
    Solid sets E_n against conv F, where F is the limit of the boundaries

    Three measurements per run: set defects of E_n against conv F, defects
    of the boundaries against F, and the Hausdorff distance between the
    boundary of conv F and F. On convex families all three vanish; the
    non-convex corpus fails one of them.
    """
    family = Family.parse(polygon_family_id)
    if family not in BOUNDARY_OF:
        raise UnknownFamily(f"{family.value} is not a region family")
    boundary = BOUNDARY_OF[family]
    if n_list is None:
        n_list = config.NGON_N_LIST if family == Family.NGON else config.DEFAULT_N_LIST
    n_list = list(n_list)
    if window is None:
        window = GridWindow.from_corners(config.BOUNDARY_WINDOW, eps)
    if family == Family.NGON:
        for n in n_list:
            if not is_convex_polygon(regular_polygon(n)):
                raise NotConvex(f"{n}-gon fails the convexity certificate")

    F = limit_family(boundary, window, eps)
    conv_F = convex_hull_sample(F)
    mismatch = hausdorff(hull_boundary_sample(F).points, F.points)

    set_series, boundary_series = [], []
    for n in n_list:
        set_series.append(kuratowski_defects(make_family(family, n, window, eps), conv_F))
        boundary_series.append(kuratowski_defects(make_family(boundary, n, window, eps), F))
        logger.debug(f"convex-boundary:{family.value} n={n}: set {set_series[-1].value:.4f}, "
                     f"boundary {boundary_series[-1].value:.4f}")

    notes = []
    boundary_ok = boundary_series[-1].value <= tol
    if diverges(set_series, tol):
        verdict = Verdict.DIVERGES
        notes.append("set defects against conv F persist")
    elif mismatch > tol:
        verdict = Verdict.DIVERGES
        notes.append(f"boundary mismatch: boundary of conv F is {mismatch:.3f} from F")
    elif not boundary_ok:
        verdict = Verdict.INCONCLUSIVE
        notes.append("boundary samples do not settle")
    else:
        verdict = judge(set_series, tol, n_list)
    return ConvergenceReport(
        experiment_id=f"convex-boundary:{family.value}", n_list=n_list, defect_series=set_series, tolerance=tol,
        verdict=verdict, notes=notes, checks={"boundary_mismatch": mismatch},
        aux_series={"boundary_defect": [d.value for d in boundary_series]},
        parameters={"family": family.value, "eps": eps},
    )


# ---------------------------------------------------------------------------
# Delaunay witnesses of the liminf inclusion
# ---------------------------------------------------------------------------

def ellipse_sites(n: int) -> np.ndarray:
    """n sites on the ellipse with semi-axes 1 + 1/n and 1, off the symmetric positions"""
    theta = 2.0 * np.pi * (np.arange(n) + 0.3) / n
    return np.column_stack([(1.0 + 1.0 / n) * np.cos(theta), np.sin(theta)])


def verify_delaunay_witness(n_list: Optional[Sequence[int]] = None, y: Sequence[float] = (0.3, 0.2),
                            tol: float = config.DEFAULT_TOL) -> ConvergenceReport:
    """
    Empty-circle triangles of sites X_n -> unit circle around a fixed y

    The circumcenter x_n of the triangle containing y must approach the
    center 0, and the triangle's vertices must be nearest sites of x_n.
    """
    n_list = list(n_list or [8, 16, 32, 64, 128])
    y = np.asarray(y, dtype=float)
    series = []
    nearest_ok = True
    notes = []
    for n in n_list:
        sites = ellipse_sites(n)
        try:
            diagram = triangulate(sites)
        except GeneralPositionViolation:
            diagram = triangulate(sites, perturb=True)
            notes.append(f"n={n}: perturbed")
        witness = locate_empty_circle(y, diagram=diagram)
        center = np.asarray(witness.center)
        nearest = float(cKDTree(sites).query(center)[0])
        nearest_ok &= nearest >= witness.radius * (1.0 - 1e-9)
        series.append(float(np.linalg.norm(center)))
    verdict = judge(series, tol, n_list) if nearest_ok else Verdict.INCONCLUSIVE
    if not nearest_ok:
        notes.append("a triangle vertex is not a nearest site of its circumcenter")
    return ConvergenceReport(
        experiment_id="delaunay-witness", n_list=n_list, defect_series=series, tolerance=tol,
        verdict=verdict, notes=notes, checks={"nearest_sites_ok": float(nearest_ok)},
        parameters={"y": y.tolist()},
    )


# ---------------------------------------------------------------------------
# Subsequence extraction over a finite basis
# ---------------------------------------------------------------------------

class CellSetSequence(BaseModel):
    """Sequence of subsets of a finite universe of cells"""
    model_config = ConfigDict(frozen=True)

    universe: Tuple[int, ...] = Field(..., description="Cell ids standing for a countable basis")
    members: Tuple[FrozenSet[int], ...] = Field(..., description="One subset of the universe per index")

    @model_validator(mode="after")
    def check_members(self):
        cells = set(self.universe)
        for k, member in enumerate(self.members):
            if not member <= cells:
                raise ValueError(f"member {k} has cells outside the universe: {sorted(member - cells)[:5]}")
        return self


def zarankiewicz_extract(seq: CellSetSequence) -> Tuple[List[int], FrozenSet[int]]:
    """
    Nested restriction over the cells: keep the indices missing the cell or
    those hitting it, whichever is larger, ties to the hitting ones

    Along the result every cell is either hit by all members or by none,
    and the limit is the set of hit cells.
    """
    if not seq.members:
        raise ValueError("empty sequence")
    indices = list(range(len(seq.members)))
    for cell in seq.universe:
        hit = [k for k in indices if cell in seq.members[k]]
        miss = [k for k in indices if cell not in seq.members[k]]
        indices = miss if len(miss) > len(hit) else hit
    limit = frozenset(seq.members[indices[0]])
    return indices, limit


def cell_limits(seq: CellSetSequence, indices: Sequence[int]) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """Lower and upper limits of the members along the indices (all cells hit, any cell hit)"""
    members = [seq.members[k] for k in indices]
    return frozenset.intersection(*members), frozenset.union(*members)


def cell_sequence_of_family(family_id, n_list: Sequence[int], window: GridWindow, eps: float,
                            cell_h: float) -> CellSetSequence:
    """Cells of size cell_h in the window hit by the samples of a family"""
    shape = tuple(int(np.ceil((hi - lo) / cell_h)) for lo, hi in zip(window.lo, window.hi))
    members = []
    for n in n_list:
        S = make_family(family_id, n, window, eps)
        pts = S.inside(window)
        idx = np.floor((pts - window.lo_array) / cell_h).astype(int)
        idx = np.clip(idx, 0, np.asarray(shape) - 1)
        members.append(frozenset(int(c) for c in np.ravel_multi_index(idx.T, shape)))
    return CellSetSequence(universe=tuple(range(int(np.prod(shape)))), members=tuple(members))


def zarankiewicz_of_family(family_id=Family.HALF_DISC_BOUNDARY, n_list: Optional[Sequence[int]] = None,
                           window: Optional[GridWindow] = None, eps: float = config.DEFAULT_REGION_EPS,
                           cell_h: float = 0.25, tol: float = config.DEFAULT_TOL) -> ConvergenceReport:
    """Extract a convergent subsequence from a family through its cell memberships"""
    n_list = list(n_list or range(2, 14))
    window = window or GridWindow.from_corners(config.BOUNDARY_WINDOW, eps)
    seq = cell_sequence_of_family(family_id, n_list, window, eps, cell_h)
    indices, limit = zarankiewicz_extract(seq)
    lower, upper = cell_limits(seq, indices)
    settled = lower == upper == limit
    return ConvergenceReport(
        experiment_id=f"zarankiewicz:{Family.parse(family_id).value}", n_list=[n_list[k] for k in indices],
        tolerance=tol, verdict=Verdict.CONVERGES if settled else Verdict.INCONCLUSIVE,
        checks={"cells": float(len(seq.universe)), "limit_cells": float(len(limit))},
        parameters={"family": Family.parse(family_id).value, "cell_h": cell_h, "eps": eps},
    )


# ---------------------------------------------------------------------------
# The cubic fiber counterexample
# ---------------------------------------------------------------------------

class FiberSeries(BaseModel):
    """Lower defects of the zero set of x (x - y)^2 against its fibers at levels c"""
    model_config = ConfigDict(frozen=True)

    c_values: List[float]
    total: List[float] = Field(..., description="Defect over the whole zero set, per c")
    branches: Dict[str, List[float]] = Field(..., description="Defect per branch of the zero set, per c")
    delta: Dict[str, float] = Field(..., description="Per sign of c: best branch lower bound over the series")


def _fiber_at(c: float, window: GridWindow, grid_h: float) -> SampledSet:
    if c == 0:
        raise ZeroLevel("the zero level is the limit itself")
    return sample_level_set(cubic_fiber_function, c, window, 2.0 * grid_h, label=f"fiber[{c:g}]")


def fiber_counterexample_defect(c: float, window: Optional[GridWindow] = None,
                                grid_h: float = config.DEFAULT_GRID_H) -> float:
    """Lower defect of the zero set against the fiber at level c"""
    window = window or GridWindow.from_corners(config.FIBER_WINDOW, grid_h)
    fiber = _fiber_at(c, window, grid_h)
    zero = SampledSet(points=fiber_zero_set(window, grid_h), eps=grid_h, window=window, label="zero set")
    return kuratowski_defects(fiber, zero).lower_defect


def fiber_counterexample_series(c_values: Optional[Sequence[float]] = None, window: Optional[GridWindow] = None,
                                grid_h: float = config.DEFAULT_GRID_H) -> FiberSeries:
    c_values = list(c_values or [s * 10.0 ** -k for s in (1.0, -1.0) for k in range(1, 7)])
    window = window or GridWindow.from_corners(config.FIBER_WINDOW, grid_h)
    zero = SampledSet(points=fiber_zero_set(window, grid_h), eps=grid_h, window=window, label="zero set")
    shrunk = window.shrink(default_margin(zero) + grid_h)
    branches = {name: pts[shrunk.contains(pts)] for name, pts in fiber_zero_branches(window, grid_h).items()}

    total = []
    per_branch: Dict[str, List[float]] = {name: [] for name in branches}
    for c in c_values:
        fiber = _fiber_at(c, window, grid_h)
        total.append(kuratowski_defects(fiber, zero).lower_defect)
        for name, pts in branches.items():
            per_branch[name].append(float(np.max(fiber.tree.query(pts)[0])) if len(pts) else 0.0)

    delta = {}
    for label, sign in (("positive", 1.0), ("negative", -1.0)):
        idx = [k for k, c in enumerate(c_values) if np.sign(c) == sign]
        if idx:
            delta[label] = max(min(per_branch[name][k] for k in idx) for name in per_branch)
    return FiberSeries(c_values=c_values, total=total, branches=per_branch, delta=delta)


def verify_fiber_counterexample(c_values: Optional[Sequence[float]] = None, grid_h: float = config.DEFAULT_GRID_H,
                                tol: float = config.DEFAULT_TOL) -> ConvergenceReport:
    result = fiber_counterexample_series(c_values, grid_h=grid_h)
    persistent = len(result.delta) == 2 and min(result.delta.values()) >= 2.0 * tol
    return ConvergenceReport(
        experiment_id="fiber-counterexample", n_list=list(range(1, len(result.c_values) + 1)),
        defect_series=result.total, tolerance=tol,
        verdict=Verdict.DIVERGES if persistent else Verdict.INCONCLUSIVE,
        notes=[f"delta for c {sign}: {value:.4f}" for sign, value in result.delta.items()],
        checks={f"delta_{sign}": value for sign, value in result.delta.items()},
        aux_series=result.branches, parameters={"c_values": result.c_values, "grid_h": grid_h},
    )


# ---------------------------------------------------------------------------
# Catalogue
# ---------------------------------------------------------------------------

SUITES: Dict[str, Callable[..., ConvergenceReport]] = {
    "sq-dist": verify_sq_dist_convergence,
    "dist-counterexample": verify_dist_counterexample,
    "lipschitz": verify_lipschitz_theorem,
    "sawtooth-pointwise": verify_sawtooth_pointwise,
    "spike-unbounded": verify_spike_unbounded,
    "level-sets": verify_level_sets,
    "level-sets-c1": verify_level_sets_c1,
    "convex-boundary": verify_convex_boundary,
    "delaunay-witness": verify_delaunay_witness,
    "zarankiewicz": zarankiewicz_of_family,
    "fiber-counterexample": verify_fiber_counterexample,
}

# Suite keyword naming the family, per suite
FAMILY_ARGUMENT = {
    "sq-dist": "family_id",
    "lipschitz": "pl_family_id",
    "level-sets": "function_family_id",
    "level-sets-c1": "vector_family_id",
    "convex-boundary": "polygon_family_id",
    "zarankiewicz": "family_id",
}


class Experiment(BaseModel):
    """One catalogue entry: a suite, its arguments and the verdict it should reach"""
    model_config = ConfigDict(frozen=True)

    suite: str
    kwargs: Dict[str, Any] = Field(default_factory=dict)
    expected: Optional[Verdict] = None

    @property
    def name(self) -> str:
        family = self.kwargs.get(FAMILY_ARGUMENT.get(self.suite, ""), "")
        extra = self.kwargs.get("against", "")
        return ":".join(str(part) for part in (self.suite, getattr(family, "value", family), extra) if part)


CATALOGUE: List[Experiment] = [
    Experiment(suite="sq-dist", kwargs={"family_id": "paper-x-n"}, expected=Verdict.CONVERGES),
    Experiment(suite="sq-dist", kwargs={"family_id": "sphere-3d",
                                        "window": GridWindow.cube(3, -1.0, 1.0, 0.25)}),
    Experiment(suite="dist-counterexample", expected=Verdict.DIVERGES),
    Experiment(suite="dist-counterexample", kwargs={"against": "jump"}, expected=Verdict.CONVERGES),
    Experiment(suite="lipschitz", kwargs={"pl_family_id": "abs-shrink"}, expected=Verdict.CONVERGES),
    Experiment(suite="lipschitz", kwargs={"pl_family_id": "sawtooth", "n_list": config.SAWTOOTH_N_LIST},
               expected=Verdict.INCONCLUSIVE),
    Experiment(suite="sawtooth-pointwise", expected=Verdict.DIVERGES),
    Experiment(suite="spike-unbounded", expected=Verdict.DIVERGES),
    Experiment(suite="level-sets", kwargs={"function_family_id": "quadratic-1d"}, expected=Verdict.CONVERGES),
    Experiment(suite="level-sets", kwargs={"function_family_id": "circle-2d"}, expected=Verdict.CONVERGES),
    Experiment(suite="level-sets-c1", kwargs={"vector_family_id": "parabola-shift"}, expected=Verdict.CONVERGES),
    Experiment(suite="level-sets-c1", kwargs={"vector_family_id": "linear-shift"}, expected=Verdict.CONVERGES),
    Experiment(suite="convex-boundary", kwargs={"polygon_family_id": "ngon"}, expected=Verdict.CONVERGES),
    Experiment(suite="convex-boundary", kwargs={"polygon_family_id": "annulus-solid"}, expected=Verdict.DIVERGES),
    Experiment(suite="convex-boundary", kwargs={"polygon_family_id": "shifted-disc"}, expected=Verdict.DIVERGES),
    Experiment(suite="convex-boundary", kwargs={"polygon_family_id": "complement"}, expected=Verdict.DIVERGES),
    Experiment(suite="convex-boundary", kwargs={"polygon_family_id": "horns"}, expected=Verdict.DIVERGES),
    Experiment(suite="delaunay-witness", expected=Verdict.CONVERGES),
    Experiment(suite="zarankiewicz", expected=Verdict.CONVERGES),
    Experiment(suite="fiber-counterexample", expected=Verdict.DIVERGES),
]


def run_experiment(experiment: Experiment) -> ConvergenceReport:
    """Run a catalogue entry and attach its expected verdict"""
    if experiment.suite not in SUITES:
        raise UnknownFamily(f"unknown suite '{experiment.suite}'")
    report = SUITES[experiment.suite](**experiment.kwargs)
    return report.model_copy(update={"expected": experiment.expected})
