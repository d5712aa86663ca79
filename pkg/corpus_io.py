#!/usr/bin/env python3
"""
Corpus I/O
Reads and writes samples, PL functions, graphs, Delaunay diagrams and
experiment reports as CSV / JSON

CSV floats are written with 17 significant digits and read back with
round-trip precision, so every artifact reloads bit-identically.
"""

import json
import logging
import os
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

import config
from delaunay import CertificateReport, DelaunayDiagram
from harness import ConvergenceReport
from multifun import MultifunctionGraph
from sets import DefectPair, GridWindow, SampledSet
from subdiff import PLFunction1D

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ["experiment_id", "n", "lower_defect", "upper_defect", "value"]


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def _to_csv(df: pd.DataFrame, handle) -> None:
    df.to_csv(handle, index=False, float_format=config.CSV_FLOAT_FORMAT, lineterminator="\n")


def _write_with_header(path: str, meta: Dict[str, object], table: pd.DataFrame) -> str:
    """One metadata row (header + values) followed by the point table"""
    _ensure_parent(path)
    with open(path, "w", newline="") as handle:
        _to_csv(pd.DataFrame([meta]), handle)
        _to_csv(table, handle)
    return path


def _read_with_header(path: str) -> Tuple[pd.Series, pd.DataFrame]:
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such artifact: {path}")
    meta = pd.read_csv(path, nrows=1, float_precision="round_trip").iloc[0]
    table = pd.read_csv(path, skiprows=2, float_precision="round_trip")
    return meta, table


def _window_meta(window: GridWindow) -> Dict[str, float]:
    meta = {}
    meta.update({f"window_lo_{k}": v for k, v in enumerate(window.lo)})
    meta.update({f"window_hi_{k}": v for k, v in enumerate(window.hi)})
    meta["h"] = window.h
    return meta


def _window_from_meta(meta: pd.Series, dim: int) -> GridWindow:
    return GridWindow(
        lo=tuple(float(meta[f"window_lo_{k}"]) for k in range(dim)),
        hi=tuple(float(meta[f"window_hi_{k}"]) for k in range(dim)),
        h=float(meta["h"]),
    )


# ---------------------------------------------------------------------------
# Samples, PL functions, graphs
# ---------------------------------------------------------------------------

def write_sampled_set(S: SampledSet, path: str) -> str:
    meta = {"dim": S.dim, "eps": S.eps}
    meta.update(_window_meta(S.window))
    table = pd.DataFrame(S.points, columns=[f"x{k}" for k in range(S.dim)])
    logger.debug(f"writing {S.size} samples to {path}")
    return _write_with_header(path, meta, table)


def read_sampled_set(path: str, label: str = "") -> SampledSet:
    meta, table = _read_with_header(path)
    dim = int(meta["dim"])
    points = table[[f"x{k}" for k in range(dim)]].to_numpy(dtype=float).reshape(-1, dim)
    return SampledSet(points=points, eps=float(meta["eps"]), window=_window_from_meta(meta, dim),
                      label=label or os.path.splitext(os.path.basename(path))[0])


def write_pl_function(f: PLFunction1D, path: str) -> str:
    _ensure_parent(path)
    df = pd.DataFrame({"breakpoint": f.breakpoints, "value": f.values})
    with open(path, "w", newline="") as handle:
        _to_csv(df, handle)
    return path


def read_pl_function(path: str) -> PLFunction1D:
    df = pd.read_csv(path, float_precision="round_trip")
    return PLFunction1D.from_points(df["breakpoint"].tolist(), df["value"].tolist())


def write_graph(G: MultifunctionGraph, path: str) -> str:
    meta = {"p": G.source_dim, "q": G.target_dim, "eps": G.eps}
    meta.update(_window_meta(G.window))
    meta["truncated"] = G.truncated
    columns = [f"x{k}" for k in range(G.source_dim)] + [f"y{k}" for k in range(G.target_dim)]
    return _write_with_header(path, meta, pd.DataFrame(G.pairs, columns=columns))


def read_graph(path: str, label: str = "") -> MultifunctionGraph:
    meta, table = _read_with_header(path)
    p, q = int(meta["p"]), int(meta["q"])
    columns = [f"x{k}" for k in range(p)] + [f"y{k}" for k in range(q)]
    truncated = meta["truncated"]
    if isinstance(truncated, str):
        truncated = truncated.strip().lower() == "true"
    return MultifunctionGraph(
        pairs=table[columns].to_numpy(dtype=float).reshape(-1, p + q), source_dim=p, target_dim=q,
        eps=float(meta["eps"]), window=_window_from_meta(meta, p + q), truncated=bool(truncated),
        label=label or os.path.splitext(os.path.basename(path))[0],
    )


# ---------------------------------------------------------------------------
# Delaunay diagrams
# ---------------------------------------------------------------------------

def write_diagram(diagram: DelaunayDiagram, stem: str, certificate: Optional[CertificateReport] = None) -> List[str]:
    """<stem>_edges.csv, <stem>_triangles.csv and, with a certificate, <stem>_certificate.json"""
    _ensure_parent(stem)
    edges = pd.DataFrame({
        "i": diagram.edges[:, 0],
        "j": diagram.edges[:, 1],
        "locally_delaunay": diagram.locally_delaunay,
    })
    triangles = pd.DataFrame({
        "a": diagram.triangles[:, 0],
        "b": diagram.triangles[:, 1],
        "c": diagram.triangles[:, 2],
        "cx": diagram.centers[:, 0],
        "cy": diagram.centers[:, 1],
        "radius": diagram.radii,
    })
    paths = [f"{stem}_edges.csv", f"{stem}_triangles.csv"]
    for df, path in zip((edges, triangles), paths):
        with open(path, "w", newline="") as handle:
            _to_csv(df, handle)
    if certificate is not None:
        document = certificate.model_dump(mode="json")
        document["passed"] = certificate.passed
        document["perturbed"] = diagram.perturbed
        paths.append(_write_json(document, f"{stem}_certificate.json"))
    logger.debug(f"diagram written to {stem}_*")
    return paths


def read_diagram_tables(stem: str) -> Tuple[pd.DataFrame, pd.DataFrame]:
    edges = pd.read_csv(f"{stem}_edges.csv", float_precision="round_trip")
    triangles = pd.read_csv(f"{stem}_triangles.csv", float_precision="round_trip")
    return edges, triangles


def write_sites(sites: np.ndarray, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", newline="") as handle:
        _to_csv(pd.DataFrame(np.asarray(sites, dtype=float), columns=["x0", "x1"]), handle)
    return path


def read_sites(path: str) -> np.ndarray:
    df = pd.read_csv(path, float_precision="round_trip")
    return df[["x0", "x1"]].to_numpy(dtype=float)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def _write_json(document: Dict, path: str) -> str:
    _ensure_parent(path)
    with open(path, "w") as handle:
        handle.write(json.dumps(document, indent=2, sort_keys=True))
        handle.write("\n")
    return path


def report_filename(report: ConvergenceReport) -> str:
    return report.experiment_id.replace(":", "_").replace("/", "_")


def write_report_json(report: ConvergenceReport, path: str) -> str:
    return _write_json(report.model_dump(mode="json"), path)


def read_report_json(path: str) -> ConvergenceReport:
    with open(path) as handle:
        return ConvergenceReport.model_validate(json.load(handle))


def series_frame(reports: Iterable[ConvergenceReport]) -> pd.DataFrame:
    """Tidy defect series of all reports; scalar series fill both defect columns"""
    rows = []
    for report in reports:
        for n, entry in zip(report.n_list, report.defect_series):
            if isinstance(entry, DefectPair):
                lower, upper = entry.lower_defect, entry.upper_defect
            else:
                lower = upper = float(entry)
            rows.append({"experiment_id": report.experiment_id, "n": n, "lower_defect": lower,
                         "upper_defect": upper, "value": max(lower, upper)})
    return pd.DataFrame(rows, columns=SERIES_COLUMNS)


def write_series_csv(reports: Iterable[ConvergenceReport], path: str) -> str:
    _ensure_parent(path)
    with open(path, "w", newline="") as handle:
        _to_csv(series_frame(reports), handle)
    return path


def read_series_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def write_reports(reports: List[ConvergenceReport], directory: str, formats: Iterable[str] = ("json", "csv"),
                  stem: str = "series") -> List[str]:
    """One JSON document per report and one series CSV for the batch"""
    formats = set(formats)
    os.makedirs(directory, exist_ok=True)
    paths = []
    if "json" in formats:
        for report in reports:
            paths.append(write_report_json(report, os.path.join(directory, f"{report_filename(report)}.json")))
    if "csv" in formats:
        paths.append(write_series_csv(reports, os.path.join(directory, f"{stem}.csv")))
    if "xlsx" in formats:
        from report_workbook import generate_report_workbook
        paths.append(generate_report_workbook(reports, os.path.join(directory, f"{stem}.xlsx")))
    logger.info(f"✓ Wrote {len(paths)} report artifacts to {directory}")
    return paths
