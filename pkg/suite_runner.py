#!/usr/bin/env python3
"""
Experiment Runner with Clear Logging
Runs catalogue experiments on a thread pool and writes their reports
"""

import os
import sys
import logging
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from typing import List, Optional, Sequence

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import config
from corpus_io import write_reports
from errors import SetConvergenceError
from harness import CATALOGUE, ConvergenceReport, Experiment, Verdict, run_experiment

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s | %(levelname)-8s | %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


def setup_logging(log_dir: Optional[str] = None, log_name: str = "suite_runner.log") -> str:
    """File + console logging for a run; returns the log file path"""
    log_dir = log_dir or config.LOG_DIR
    os.makedirs(log_dir, exist_ok=True)
    log_file = os.path.join(log_dir, log_name)
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
        format=LOG_FORMAT,
        datefmt=LOG_DATEFMT,
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler()
        ]
    )
    return log_file


def log_rule():
    logger.info("#" * 72)


def log_stage(title):
    """Open a stage of the run in the log: a blank line, the title and a thin underline"""
    logger.info("")
    logger.info(f"[{title.lower()}]")
    logger.info("." * 72)


def failure_report(experiment: Experiment, error: Exception) -> ConvergenceReport:
    """INCONCLUSIVE report standing in for an experiment that raised"""
    tol = experiment.kwargs.get("tol", config.DEFAULT_TOL)
    return ConvergenceReport(
        experiment_id=experiment.name,
        tolerance=tol if tol > 0 else config.DEFAULT_TOL,
        verdict=Verdict.INCONCLUSIVE,
        expected=experiment.expected,
        notes=[f"{type(error).__name__}: {error}"],
    )


class SuiteRunner:
    """Run independent experiments concurrently, collecting in submission order"""

    def __init__(self, experiments: Optional[Sequence[Experiment]] = None, workers: Optional[int] = None):
        self.experiments = list(CATALOGUE if experiments is None else experiments)
        self.workers = max(1, workers or config.WORKERS)

    def run_one(self, experiment: Experiment) -> ConvergenceReport:
        try:
            report = run_experiment(experiment)
        except SetConvergenceError as e:
            logger.error(f"✗ {experiment.name} raised: {e}", exc_info=True)
            return failure_report(experiment, e)
        logger.info(f"✓ {experiment.name}: {report.verdict.value}")
        return report

    def run(self) -> List[ConvergenceReport]:
        log_rule()
        logger.info(f"set convergence run started {datetime.now():%Y-%m-%d %H:%M:%S}")
        logger.info(f"{len(self.experiments)} experiments on {self.workers} workers")
        log_rule()

        log_stage("Running experiments")
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            futures = [pool.submit(self.run_one, experiment) for experiment in self.experiments]
            reports = [future.result() for future in futures]

        log_stage("Verdicts")
        for report in reports:
            marker = "✗" if report.unexpected else ("○" if report.verdict == Verdict.INCONCLUSIVE else "✓")
            expected = report.expected.value if report.expected else "-"
            logger.info(f"{marker} {report.experiment_id:<40} {report.verdict.value:<13} expected {expected}")
        unexpected = sum(report.unexpected for report in reports)
        if unexpected:
            logger.warning(f"✗ {unexpected} experiments diverged where convergence was expected")
        log_rule()
        return reports


def main():
    """Entry point: run the whole catalogue and write every report format"""
    setup_logging()
    try:
        reports = SuiteRunner().run()
        write_reports(reports, config.OUTPUT_DIR, formats=config.REPORT_FORMATS)
    except Exception as e:
        logger.error(f"✗ FATAL ERROR IN MAIN: {e}", exc_info=True)
        sys.exit(1)
    if any(report.unexpected for report in reports):
        sys.exit(1)


if __name__ == "__main__":
    main()
