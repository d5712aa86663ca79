"""Tests for the experiment runner and the report workbook."""

import logging
import os

import openpyxl
import pytest

from errors import NotConvex
from harness import ConvergenceReport, Experiment, Verdict
from report_workbook import generate_report_workbook, sheet_title
from suite_runner import SuiteRunner, failure_report, setup_logging


def test_failure_report_is_inconclusive():
    experiment = Experiment(suite="convex-boundary", kwargs={"polygon_family_id": "ngon"},
                            expected=Verdict.CONVERGES)
    report = failure_report(experiment, NotConvex("8-gon fails the convexity certificate"))
    assert report.experiment_id == "convex-boundary:ngon"
    assert report.verdict == Verdict.INCONCLUSIVE
    assert report.notes == ["NotConvex: 8-gon fails the convexity certificate"]
    assert not report.unexpected


def test_runner_keeps_submission_order():
    experiments = [
        Experiment(suite="spike-unbounded", expected=Verdict.DIVERGES),
        Experiment(suite="no-such-suite"),
        Experiment(suite="sawtooth-pointwise", expected=Verdict.DIVERGES),
    ]
    reports = SuiteRunner(experiments, workers=2).run()
    assert [r.experiment_id for r in reports] == ["spike-unbounded", "no-such-suite", "sawtooth-pointwise:0.5"]
    assert reports[1].verdict == Verdict.INCONCLUSIVE
    assert reports[1].notes[0].startswith("UnknownFamily")
    assert reports[0].verdict == reports[2].verdict == Verdict.DIVERGES


def test_setup_logging_creates_directory(tmp_path):
    log_dir = tmp_path / "logs"
    path = setup_logging(str(log_dir), "run.log")
    assert os.path.isdir(log_dir)
    assert path == os.path.join(str(log_dir), "run.log")


def test_run_log_marks_its_stages(caplog):
    caplog.set_level(logging.INFO, logger="suite_runner")
    assert SuiteRunner([], workers=1).run() == []
    messages = [record.getMessage() for record in caplog.records]
    assert "[running experiments]" in messages
    assert "[verdicts]" in messages
    assert messages.count("#" * 72) == 3


class TestWorkbook:

    def test_sheet_titles(self):
        assert sheet_title("sq-dist:paper-x-n") == "sq-dist_paper-x-n"
        long = "x" * 40
        assert len(sheet_title(long)) == 31
        assert sheet_title(long, [long[:31]]) == "x" * 29 + "~1"

    def test_summary_and_report_sheets(self, tmp_path):
        reports = [
            ConvergenceReport(experiment_id="lipschitz:abs-shrink", n_list=[5, 10], defect_series=[0.2, 0.01],
                              tolerance=0.05, verdict=Verdict.CONVERGES, expected=Verdict.CONVERGES,
                              aux_series={"sup_norm": [0.2, 0.1]}),
            ConvergenceReport(experiment_id="spike-unbounded", tolerance=0.05, verdict=Verdict.DIVERGES,
                              expected=Verdict.CONVERGES, notes=["limit value at 0 is the whole line"]),
        ]
        path = generate_report_workbook(reports, str(tmp_path / "series.xlsx"))
        wb = openpyxl.load_workbook(path)
        assert wb.sheetnames == ["Summary", "lipschitz_abs-shrink", "spike-unbounded"]
        summary = wb["Summary"]
        assert summary.cell(6, 1).value == "lipschitz:abs-shrink"
        assert summary.cell(6, 2).value == "CONVERGES"
        assert summary.cell(6, 4).value == pytest.approx(0.01)
        assert summary.cell(7, 6).value == "YES"

    def test_summary_layout(self, tmp_path):
        reports = [ConvergenceReport(experiment_id="dist-counterexample:real-line", n_list=[2, 3],
                                     defect_series=[1.0, 1.0], tolerance=0.05, verdict=Verdict.DIVERGES,
                                     expected=Verdict.CONVERGES, checks={"slice_defect_at_0": 1.0})]
        wb = openpyxl.load_workbook(generate_report_workbook(reports, str(tmp_path / "layout.xlsx")))
        summary = wb["Summary"]
        assert summary.cell(3, 1).value.startswith("1 experiments (1 unexpected)")
        assert summary.cell(5, 1).style == "column_head"
        assert summary.cell(6, 2).style == "verdict_diverges"
        assert summary.freeze_panes == "A6"
        sheet = wb["dist-counterexample_real-line"]
        assert sheet.cell(1, 1).style == "block_title"
        assert sheet.cell(5, 1).value == "slice_defect_at_0"
        assert sheet.cell(5, 2).number_format == "0.000E+00"
