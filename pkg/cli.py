#!/usr/bin/env python3
"""
Set Convergence Toolkit - command line
Commands: corpus → converge → delaunay → verify

  corpus    write samples of a set family (or a PL family) as CSV
  converge  Kuratowski defect series of a family against its limit
  delaunay  triangulate sites, export edges / triangles / certificate
  verify    run a harness suite (or the whole catalogue) and write reports

Options may also come from a flat key=value file (--config); flags win over
the file, the file wins over the defaults. Exit status: 0 on success, 1 when
a verdict contradicts the expected one or a certificate fails, 2 on usage
and input errors.
"""

import argparse
import inspect
import logging
import os
import sys
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import config
from corpus_io import report_filename, write_diagram, write_pl_function, write_reports, write_sampled_set, read_sites
from delaunay import triangulate, verify_certificates
from errors import SetConvergenceError, UnknownFamily
from harness import CATALOGUE, FAMILY_ARGUMENT, SUITES, ConvergenceReport, Experiment, judge
from level_sets import get_level_family
from sets import (
    Family, GridWindow, family_dimensions, has_limit, kuratowski_defects, limit_family, make_family,
)
from subdiff import PLFamily, build_pl_family
from suite_runner import SuiteRunner, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2

# Config-file keys that are switches rather than values
_SWITCHES = ("perturb", "limit")

# Config-file spellings of the flag names
_FILE_KEYS = {"family": "family_id", "n": "n_list", "format": "formats", "grid_h": "h"}


def _split(value) -> List[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [part.strip() for part in str(value).split(",") if part.strip()]


def _truthy(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in ("1", "true", "yes", "on")


class RunConfig(BaseModel):
    """Validated options of one command-line run"""

    command: Literal["corpus", "converge", "delaunay", "verify"]
    family_id: Optional[str] = Field(None, description="Set, PL or function family identifier")
    n_list: Optional[List[int]] = Field(None, description="Strictly increasing positive indices")
    window: Optional[List[float]] = Field(None, description="lo,hi for a cube or lo0,hi0,lo1,hi1,.. per axis")
    h: float = Field(config.DEFAULT_GRID_H, gt=0, description="Grid step of the evaluation window")
    eps: Optional[float] = Field(None, gt=0, description="Sample fidelity")
    tol: float = Field(config.DEFAULT_TOL, gt=0, description="Convergence tolerance")
    margin: Optional[float] = Field(None, gt=0, description="Window shrink for defect evaluation")
    output: str = Field(default_factory=lambda: config.OUTPUT_DIR, description="Output directory")
    formats: List[str] = Field(default_factory=lambda: ["csv", "json"], description="Report formats")
    seed: int = Field(0, ge=0)
    suite: Optional[str] = Field(None, description="Harness suite name, or 'all'")
    sites: Optional[str] = Field(None, description="random:N[:seed=S], ellipse:N or a CSV file with x0,x1")
    perturb: bool = Field(False, description="Resolve degenerate sites by symbolic perturbation")
    limit: bool = Field(False, description="Also write the limit sample (corpus)")

    @field_validator("n_list", mode="before")
    @classmethod
    def parse_n_list(cls, v):
        if v is None:
            return v
        try:
            return [int(part) for part in _split(v)]
        except ValueError:
            raise ValueError(f"--n expects comma-separated integers, got '{v}'")

    @field_validator("n_list")
    @classmethod
    def check_n_list(cls, v):
        if v is None:
            return v
        if not v:
            raise ValueError("--n must name at least one index")
        if v[0] < 1 or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError(f"--n must be positive and strictly increasing, got {v}")
        return v

    @field_validator("window", mode="before")
    @classmethod
    def parse_window(cls, v):
        if v is None:
            return v
        try:
            values = [float(part) for part in _split(v)]
        except ValueError:
            raise ValueError(f"--window expects comma-separated numbers, got '{v}'")
        if not values or len(values) % 2:
            raise ValueError(f"--window needs lo,hi pairs, got {len(values)} numbers")
        for lo, hi in zip(values[::2], values[1::2]):
            if not lo < hi:
                raise ValueError(f"--window: lower bound {lo} is not below upper bound {hi}")
        return values

    @field_validator("formats", mode="before")
    @classmethod
    def parse_formats(cls, v):
        formats = [part.lower() for part in _split(v)]
        unknown = [f for f in formats if f not in config.REPORT_FORMATS]
        if unknown or not formats:
            raise ValueError(f"--format must be among {config.REPORT_FORMATS}, got {v}")
        return formats

    @field_validator(*_SWITCHES, mode="before")
    @classmethod
    def parse_switch(cls, v):
        return _truthy(v)

    @model_validator(mode="after")
    def check_command(self):
        if self.command in ("corpus", "converge") and not self.family_id:
            raise ValueError(f"{self.command} needs --family")
        if self.command == "verify" and not self.suite:
            raise ValueError("verify needs --suite")
        if self.command == "delaunay" and not self.sites:
            raise ValueError("delaunay needs --sites")
        return self

    def window_for(self, dim: int) -> GridWindow:
        """The requested window in dimension dim, or [-1, 1]^dim"""
        if self.window is None:
            return GridWindow.cube(dim, -1.0, 1.0, self.h)
        if len(self.window) == 2:
            return GridWindow.cube(dim, self.window[0], self.window[1], self.h)
        if len(self.window) != 2 * dim:
            raise ValueError(f"--window gives {len(self.window) // 2} axes for a {dim}-D family")
        return GridWindow(lo=tuple(self.window[::2]), hi=tuple(self.window[1::2]), h=self.h)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="setconv", description="Set convergence experiments")
    parser.add_argument("--config", help="flat key=value file with default options")
    parser.add_argument("--output", help=f"output directory (env SETCONV_OUTPUT_DIR, default {config.OUTPUT_DIR})")
    parser.add_argument("--format", dest="formats", help="comma-separated report formats: csv,json,xlsx")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, family=True):
        if family:
            p.add_argument("--family", dest="family_id", help="family identifier")
        p.add_argument("--n", dest="n_list", help="comma-separated indices, e.g. 5,10,20")
        p.add_argument("--window", help="lo,hi or lo0,hi0,lo1,hi1")
        p.add_argument("--grid-h", dest="h", help="grid step")
        p.add_argument("--eps", help="sample fidelity")
        p.add_argument("--tol", help="convergence tolerance")

    corpus = sub.add_parser("corpus", help="write family samples")
    common(corpus)
    corpus.add_argument("--limit", action="store_true", default=None, help="also write the limit sample")

    converge = sub.add_parser("converge", help="defect series against the limit")
    common(converge)
    converge.add_argument("--margin", help="window shrink for defect evaluation")

    delaunay = sub.add_parser("delaunay", help="triangulate and certify")
    delaunay.add_argument("--sites", help="random:N[:seed=S], ellipse:N or a CSV file")
    delaunay.add_argument("--seed", help="seed for random sites")
    delaunay.add_argument("--perturb", action="store_true", default=None, help="symbolic perturbation")

    verify = sub.add_parser("verify", help="run a harness suite")
    verify.add_argument("--suite", help=f"one of {', '.join(SUITES)} or 'all'")
    common(verify)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults < config file < flags into a validated RunConfig"""
    values: Dict[str, object] = {}
    if args.config:
        if not os.path.exists(args.config):
            raise ValueError(f"config file not found: {args.config}")
        for key, value in dotenv_values(args.config).items():
            if value is not None:
                values[_FILE_KEYS.get(key.lower(), key.lower())] = value
    values.update({k: v for k, v in vars(args).items() if v is not None and k != "config"})
    if "output" not in values:
        values["output"] = config.OUTPUT_DIR
    return RunConfig.model_validate(values)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _set_family_window(cfg: RunConfig, family: Family) -> GridWindow:
    return cfg.window_for(family_dimensions(family)[0])


def run_corpus(cfg: RunConfig) -> int:
    n_list = cfg.n_list or config.DEFAULT_N_LIST
    os.makedirs(cfg.output, exist_ok=True)
    try:
        family = Family.parse(cfg.family_id)
    except UnknownFamily:
        pl_family = PLFamily.parse(cfg.family_id)
        for n in n_list:
            path = write_pl_function(build_pl_family(pl_family, n),
                                     os.path.join(cfg.output, f"{pl_family.value}_{n}.csv"))
            logger.info(f"✓ {path}")
        return EXIT_OK

    window = _set_family_window(cfg, family)
    eps = cfg.eps or config.DEFAULT_EPS
    for n in n_list:
        path = write_sampled_set(make_family(family, n, window, eps),
                                 os.path.join(cfg.output, f"{family.value}_{n}.csv"))
        logger.info(f"✓ {path}")
    if cfg.limit and has_limit(family):
        path = write_sampled_set(limit_family(family, window, eps),
                                 os.path.join(cfg.output, f"{family.value}_limit.csv"))
        logger.info(f"✓ {path}")
    return EXIT_OK


def run_converge(cfg: RunConfig) -> int:
    family = Family.parse(cfg.family_id)
    if not has_limit(family):
        raise UnknownFamily(f"{family.value} has no registered limit to converge to")
    n_list = cfg.n_list or config.DEFAULT_N_LIST
    window = _set_family_window(cfg, family)
    eps = cfg.eps or config.DEFAULT_EPS
    limit = limit_family(family, window, eps)
    series = [kuratowski_defects(make_family(family, n, window, eps), limit, cfg.margin) for n in n_list]
    report = ConvergenceReport(
        experiment_id=f"converge:{family.value}", n_list=n_list, defect_series=series, tolerance=cfg.tol,
        verdict=judge(series, cfg.tol, n_list),
        parameters={"family": family.value, "eps": eps, "h": cfg.h, "margin": cfg.margin,
                    "window_lo": list(window.lo), "window_hi": list(window.hi)},
    )
    logger.info(f"✓ {report.experiment_id}: {report.verdict.value} (final defect {report.final_defect:.3e})")
    write_reports([report], cfg.output, cfg.formats, stem=report_filename(report))
    return EXIT_OK


def parse_sites(spec: str, seed: int = 0) -> Tuple[np.ndarray, str]:
    """Sites from random:N[:seed=S], ellipse:N or a CSV file; returns (sites, stem)"""
    if os.path.exists(spec):
        return read_sites(spec), os.path.splitext(os.path.basename(spec))[0]
    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        count = int(parts[1])
        for option in parts[2:]:
            key, _, value = option.partition("=")
            if key != "seed":
                raise ValueError(option)
            seed = int(value)
    except (IndexError, ValueError):
        raise ValueError(f"--sites expects random:N[:seed=S], ellipse:N or a CSV path, got '{spec}'")
    if count < 3:
        raise ValueError(f"--sites needs at least 3 sites, got {count}")
    if kind == "random":
        return np.random.default_rng(seed).random((count, 2)), f"random_{count}_seed{seed}"
    if kind == "ellipse":
        from harness import ellipse_sites
        return ellipse_sites(count), f"ellipse_{count}"
    raise ValueError(f"unknown site source '{kind}'")


def run_delaunay(cfg: RunConfig) -> int:
    sites, stem = parse_sites(cfg.sites, cfg.seed)
    diagram = triangulate(sites, perturb=cfg.perturb)
    certificate = verify_certificates(diagram)
    paths = write_diagram(diagram, os.path.join(cfg.output, stem), certificate)
    logger.info(f"{'✓' if certificate.passed else '✗'} {len(diagram.triangles)} triangles, "
                f"certificate {'passed' if certificate.passed else 'FAILED'} → {paths[0]}")
    return EXIT_OK if certificate.passed else EXIT_VERDICT


def _suite_family_dim(suite: str, family) -> int:
    if suite.startswith("level-sets"):
        return get_level_family(family).source_dim
    return family_dimensions(family)[0]


def build_experiment(cfg: RunConfig) -> Experiment:
    """Experiment for a single suite; expected verdict taken from the matching catalogue entry"""
    if cfg.suite not in SUITES:
        raise UnknownFamily(f"unknown suite '{cfg.suite}'; choose from {', '.join(SUITES)} or 'all'")
    parameters = inspect.signature(SUITES[cfg.suite]).parameters
    kwargs: Dict[str, object] = {}
    family_arg = FAMILY_ARGUMENT.get(cfg.suite)
    family = None
    if family_arg:
        family = cfg.family_id or parameters[family_arg].default
        family = getattr(family, "value", family)
        kwargs[family_arg] = family
    elif cfg.family_id:
        raise ValueError(f"suite {cfg.suite} takes no --family")
    if cfg.n_list is not None and "n_list" in parameters:
        kwargs["n_list"] = cfg.n_list
    if "tol" in parameters:
        kwargs["tol"] = cfg.tol
    if cfg.eps is not None and "eps" in parameters:
        kwargs["eps"] = cfg.eps
    if "grid_h" in parameters:
        kwargs["grid_h"] = cfg.h
    if cfg.window is not None and "window" in parameters and family is not None:
        kwargs["window"] = cfg.window_for(_suite_family_dim(cfg.suite, family))

    candidate = Experiment(suite=cfg.suite, kwargs=kwargs)
    expected = next((e.expected for e in CATALOGUE if e.name == candidate.name), None)
    return candidate.model_copy(update={"expected": expected})


def run_verify(cfg: RunConfig) -> int:
    experiments = list(CATALOGUE) if cfg.suite == "all" else [build_experiment(cfg)]
    reports = SuiteRunner(experiments).run()
    write_reports(reports, cfg.output, cfg.formats)
    return EXIT_VERDICT if any(report.unexpected for report in reports) else EXIT_OK


COMMANDS = {
    "corpus": run_corpus,
    "converge": run_converge,
    "delaunay": run_delaunay,
    "verify": run_verify,
}


def run(cfg: RunConfig) -> int:
    return COMMANDS[cfg.command](cfg)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the exit status"""
    args = build_parser().parse_args(argv)
    setup_logging()
    try:
        cfg = resolve_config(args)
        return run(cfg)
    except ValidationError as e:
        for error in e.errors():
            where = ".".join(str(part) for part in error["loc"]) or "options"
            print(f"error: {where}: {error['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except (SetConvergenceError, ValueError) as e:
        logger.error(f"✗ {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
