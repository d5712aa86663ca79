"""Tests for the convergence experiments and the catalogue."""

import numpy as np
import pytest

import config
from errors import UnknownFamily, ZeroLevel
from harness import (
    CATALOGUE, CellSetSequence, ConvergenceReport, Experiment, Verdict, cell_limits, ellipse_sites,
    dist_table_deviation, fiber_counterexample_defect, judge, run_experiment, verify_dist_counterexample,
    verify_level_sets, verify_lipschitz_theorem, verify_sawtooth_pointwise, verify_spike_unbounded,
    verify_sq_dist_convergence, zarankiewicz_extract,
)
from sets import DefectPair


class TestReports:

    def test_judge(self):
        assert judge([0.4, 0.2, 0.1, 0.02], 0.05) == Verdict.CONVERGES
        assert judge([1.0] * 6, 0.05) == Verdict.DIVERGES

    def test_final_defect(self):
        report = ConvergenceReport(experiment_id="x", n_list=[1, 2],
                                   defect_series=[DefectPair(lower_defect=0.3, upper_defect=0.1),
                                                  DefectPair(lower_defect=0.0, upper_defect=0.02)],
                                   tolerance=0.05, verdict=Verdict.CONVERGES)
        assert report.final_defect == pytest.approx(0.02)
        assert ConvergenceReport(experiment_id="y", tolerance=0.05, verdict=Verdict.DIVERGES).final_defect is None

    def test_unexpected_only_for_divergence(self):
        base = dict(experiment_id="x", tolerance=0.05, expected=Verdict.CONVERGES)
        assert ConvergenceReport(verdict=Verdict.DIVERGES, **base).unexpected
        assert not ConvergenceReport(verdict=Verdict.INCONCLUSIVE, **base).unexpected

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            ConvergenceReport(experiment_id="x", tolerance=0.0, verdict=Verdict.CONVERGES)


class TestSubdifferentialSuites:

    def test_sawtooth_slices_oscillate(self):
        report = verify_sawtooth_pointwise()
        assert report.verdict == Verdict.DIVERGES
        values = [d.value for d in report.defect_series]
        assert min(values) == pytest.approx(0.0, abs=1e-12)
        assert max(values) == pytest.approx(2.0, abs=1e-12)

    def test_spike_excess_grows(self):
        report = verify_spike_unbounded()
        assert report.verdict == Verdict.DIVERGES
        assert report.checks["excess_R10_final"] == pytest.approx(70.0)
        assert report.aux_series["excess_R1"][0] == pytest.approx(4.0)

    def test_dist_against_real_line_diverges(self):
        report = verify_dist_counterexample()
        assert report.verdict == Verdict.DIVERGES
        assert report.checks["slice_defect_at_0"] == pytest.approx(1.0, abs=1e-2)
        assert report.checks["dist_table_deviation"] == pytest.approx(0.0, abs=1e-12)

    def test_sampled_dist_matches_table_for_thin_gaps(self):
        assert dist_table_deviation(300) == pytest.approx(0.0, abs=1e-12)

    def test_sampled_sq_dist_tracks_table(self):
        report = verify_sq_dist_convergence(n_list=[5, 10])
        assert report.checks["sq_dist_table_deviation"] <= 6 * config.DEFAULT_EPS

    def test_dist_against_jump_converges(self):
        assert verify_dist_counterexample(against="jump").verdict == Verdict.CONVERGES

    def test_unknown_comparison(self):
        with pytest.raises(ValueError):
            verify_dist_counterexample(against="parabola")

    def test_failed_hypothesis_still_reports_graphs(self):
        report = verify_lipschitz_theorem("sawtooth", n_list=config.SAWTOOTH_N_LIST)
        assert report.verdict == Verdict.INCONCLUSIVE
        assert report.checks["graphs_converge"] in (0.0, 1.0)
        assert report.checks["graph_defect_final"] == pytest.approx(report.final_defect)
        assert any(note.startswith("graphs ") for note in report.notes)
        assert "limit not a.e. univalued" in report.notes


class TestLevelSetSuites:

    def test_quadratic_fibers_converge(self):
        report = verify_level_sets("quadratic-1d")
        assert report.verdict == Verdict.CONVERGES
        assert report.checks["gradient_bound"] > 1.0

    def test_vector_family_rejected(self):
        with pytest.raises(UnknownFamily):
            verify_level_sets("parabola-pair-2d")

    def test_zero_level_rejected(self):
        with pytest.raises(ZeroLevel):
            fiber_counterexample_defect(0.0)


class TestZarankiewicz:

    def test_extraction(self):
        seq = CellSetSequence(universe=(0, 1, 2),
                              members=(frozenset({0}), frozenset({0, 1}), frozenset({0}),
                                       frozenset({0, 1, 2}), frozenset({0})))
        indices, limit = zarankiewicz_extract(seq)
        assert indices == [0, 2, 4]
        assert limit == frozenset({0})
        assert cell_limits(seq, indices) == (frozenset({0}), frozenset({0}))

    def test_ties_keep_hitting_indices(self):
        seq = CellSetSequence(universe=(0,), members=(frozenset({0}), frozenset()))
        assert zarankiewicz_extract(seq) == ([0], frozenset({0}))

    def test_cells_outside_universe(self):
        with pytest.raises(ValueError):
            CellSetSequence(universe=(0, 1), members=(frozenset({5}),))


class TestCatalogue:

    def test_ellipse_sites_are_on_the_ellipse(self):
        sites = ellipse_sites(16)
        a = 1.0 + 1.0 / 16
        assert np.allclose((sites[:, 0] / a) ** 2 + sites[:, 1] ** 2, 1.0)

    def test_experiment_names(self):
        assert Experiment(suite="lipschitz", kwargs={"pl_family_id": "sawtooth"}).name == "lipschitz:sawtooth"
        assert Experiment(suite="dist-counterexample", kwargs={"against": "jump"}).name == \
            "dist-counterexample:jump"
        names = [e.name for e in CATALOGUE]
        assert len(names) == len(set(names))

    def test_unknown_suite(self):
        with pytest.raises(UnknownFamily):
            run_experiment(Experiment(suite="no-such-suite"))

    def test_expected_verdict_attached(self):
        report = run_experiment(Experiment(suite="spike-unbounded", expected=Verdict.DIVERGES))
        assert report.expected == Verdict.DIVERGES
        assert not report.unexpected

    @pytest.mark.slow
    @pytest.mark.parametrize("experiment", [e for e in CATALOGUE if e.expected is not None],
                             ids=lambda e: e.name)
    def test_catalogue_verdicts(self, experiment):
        report = run_experiment(experiment)
        assert report.verdict == experiment.expected, report.notes
