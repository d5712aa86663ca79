"""Tests for the command line: option resolution, commands and exit codes."""

import json
import os

import pytest

import config
from cli import EXIT_OK, EXIT_USAGE, RunConfig, build_experiment, main, parse_sites
from harness import Verdict


@pytest.fixture(autouse=True)
def isolated_dirs(tmp_path, monkeypatch):
    monkeypatch.setattr(config, "LOG_DIR", str(tmp_path / "logs"))
    monkeypatch.setattr(config, "OUTPUT_DIR", str(tmp_path / "default-output"))


@pytest.fixture
def out(tmp_path):
    return str(tmp_path / "out")


class TestRunConfig:

    def test_parses_comma_lists(self):
        cfg = RunConfig(command="converge", family_id="ngon", n_list="8, 32,128", window="-1.5,1.5",
                        formats="JSON,xlsx")
        assert cfg.n_list == [8, 32, 128]
        assert cfg.formats == ["json", "xlsx"]
        assert cfg.window_for(2).lo == (-1.5, -1.5)

    def test_per_axis_window(self):
        cfg = RunConfig(command="corpus", family_id="ngon", window="0,1,2,4", h=0.5)
        window = cfg.window_for(2)
        assert (window.lo, window.hi) == ((0.0, 2.0), (1.0, 4.0))
        with pytest.raises(ValueError):
            cfg.window_for(1)

    @pytest.mark.parametrize("options", [
        {"command": "converge"},
        {"command": "verify"},
        {"command": "delaunay"},
        {"command": "corpus", "family_id": "ngon", "n_list": "10,5"},
        {"command": "corpus", "family_id": "ngon", "n_list": "0,5"},
        {"command": "corpus", "family_id": "ngon", "window": "1,0"},
        {"command": "corpus", "family_id": "ngon", "formats": "pdf"},
        {"command": "corpus", "family_id": "ngon", "tol": 0},
    ])
    def test_rejects_bad_options(self, options):
        with pytest.raises(ValueError):
            RunConfig(**options)

    def test_switches_from_strings(self):
        cfg = RunConfig(command="delaunay", sites="random:10", perturb="yes")
        assert cfg.perturb


class TestExperiments:

    def test_family_default_and_expected_verdict(self):
        experiment = build_experiment(RunConfig(command="verify", suite="lipschitz"))
        assert experiment.kwargs["pl_family_id"] == "abs-shrink"
        assert experiment.expected == Verdict.CONVERGES

    def test_unknown_suite(self):
        with pytest.raises(ValueError):
            build_experiment(RunConfig(command="verify", suite="no-such-suite"))

    def test_family_on_suite_without_one(self):
        with pytest.raises(ValueError):
            build_experiment(RunConfig(command="verify", suite="spike-unbounded", family_id="ngon"))

    def test_site_sources(self):
        sites, stem = parse_sites("random:12:seed=7")
        assert sites.shape == (12, 2)
        assert stem == "random_12_seed7"
        assert parse_sites("ellipse:9")[1] == "ellipse_9"
        for bad in ("random", "random:2", "grid:10", "random:10:step=2"):
            with pytest.raises(ValueError):
                parse_sites(bad)


class TestCommands:

    def test_corpus_writes_members_and_limit(self, out):
        assert main(["--output", out, "corpus", "--family", "paper-x-n", "--n", "5,10", "--limit"]) == EXIT_OK
        assert sorted(os.listdir(out)) == ["paper-x-n_10.csv", "paper-x-n_5.csv", "paper-x-n_limit.csv"]

    def test_corpus_of_pl_family(self, out):
        assert main(["--output", out, "corpus", "--family", "sawtooth", "--n", "4"]) == EXIT_OK
        assert os.listdir(out) == ["sawtooth_4.csv"]

    def test_converge_writes_report(self, out):
        assert main(["--output", out, "converge", "--family", "paper-x-n"]) == EXIT_OK
        with open(os.path.join(out, "converge_paper-x-n.json")) as handle:
            report = json.load(handle)
        assert report["verdict"] == "CONVERGES"
        assert os.path.exists(os.path.join(out, "converge_paper-x-n.csv"))

    def test_delaunay_exports_certificate(self, out):
        assert main(["--output", out, "delaunay", "--sites", "random:30:seed=4"]) == EXIT_OK
        with open(os.path.join(out, "random_30_seed4_certificate.json")) as handle:
            assert json.load(handle)["passed"] is True

    def test_verify_single_suite(self, out):
        assert main(["--output", out, "--format", "json", "verify", "--suite", "spike-unbounded"]) == EXIT_OK
        with open(os.path.join(out, "spike-unbounded.json")) as handle:
            report = json.load(handle)
        assert report["verdict"] == report["expected"] == "DIVERGES"

    def test_config_file_with_flag_override(self, out, tmp_path):
        settings = tmp_path / "run.env"
        settings.write_text("family=paper-x-n\nn=5,10\nlimit=true\n")
        assert main(["--config", str(settings), "--output", out, "corpus", "--n", "20"]) == EXIT_OK
        assert sorted(os.listdir(out)) == ["paper-x-n_20.csv", "paper-x-n_limit.csv"]

    @pytest.mark.parametrize("argv", [
        ["converge"],
        ["converge", "--family", "half-disc"],
        ["corpus", "--family", "no-such-family"],
        ["delaunay", "--sites", "ellipse:2"],
        ["verify", "--suite", "no-such-suite"],
        ["--config", "missing.env", "verify", "--suite", "all"],
    ])
    def test_usage_errors(self, argv, out, capsys):
        assert main(["--output", out] + argv) == EXIT_USAGE
        assert "error:" in capsys.readouterr().err
