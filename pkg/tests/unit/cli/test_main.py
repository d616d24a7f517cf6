"""Tests for the command-line parser, exit codes and threshold precedence."""

import argparse
import json
from pathlib import Path

import pytest

from fibrostage.cli import build_parser, main
from fibrostage.cli.commands import _thresholds
from fibrostage.core.settings import load_settings
from fibrostage.modules.staging import Thresholds, read_staging_report


@pytest.fixture
def workdir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Run every command from an empty directory so no repository config is picked up."""
    monkeypatch.chdir(tmp_path)
    return tmp_path


@pytest.fixture
def predictions(workdir: Path) -> Path:
    path = workdir / "predictions.csv"
    rows = ["subject_id,z,y,x,prob"]
    rows += [f"A,0,0,{8 * i},{0.9 if i < 3 else 0.1}" for i in range(4)]
    rows += [f"B,0,0,{8 * i},0.2" for i in range(4)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def _config(path: Path, data: dict) -> Path:
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


class TestParser:
    """Tests for argument parsing."""

    def test_subcommands(self):
        parser = build_parser()
        for command in (
            "register",
            "extract",
            "train",
            "calibrate --predictions p.csv",
            "stage --predictions p.csv",
            "pipeline",
            "eval-seg --cases c.csv",
            "eval-cls --report r.csv",
            "overlay --subject S --predictions p.csv --slice 3",
            "phantom",
        ):
            args = parser.parse_args(command.split())
            assert callable(args.handler)

    def test_common_options(self):
        args = build_parser().parse_args(["stage", "--predictions", "p.csv", "--mode", "contrast", "--jobs", "3"])
        assert (args.mode, args.jobs, args.tau1) == ("contrast", 3, None)

    @pytest.mark.parametrize(
        "argv",
        [
            [],
            ["stage"],
            ["stage", "--predictions", "p.csv", "--tau1", "1.5"],
            ["stage", "--predictions", "p.csv", "--tau2", "0"],
            ["pipeline", "--model", "m.json", "--predictions", "p.csv"],
            ["phantom", "--mode", "pet"],
        ],
    )
    def test_invalid_arguments_exit_2(self, workdir: Path, argv: list[str]):
        with pytest.raises(SystemExit) as exc_info:
            _ = main(argv)
        assert exc_info.value.code == 2


class TestExitCodes:
    """Tests for main's exit codes."""

    def test_stage_success(self, workdir: Path, predictions: Path, capsys: pytest.CaptureFixture[str]):
        code = main(["stage", "--predictions", str(predictions), "--output-dir", str(workdir / "out")])
        assert code == 0
        results = read_staging_report(workdir / "out" / "staging_report.csv")
        assert [(r.subject_id, r.s) for r in results] == [("A", 0.75), ("B", 0.0)]
        assert results[0].task1_positive
        assert not results[1].task2_positive
        assert "subject" in capsys.readouterr().out

    def test_missing_config_file(self, workdir: Path, predictions: Path):
        assert main(["stage", "--predictions", str(predictions), "--config", "missing.json"]) == 2

    def test_unknown_config_key(self, workdir: Path, predictions: Path):
        config = _config(workdir / "c.json", {"thresholds": {"tau1": 0.3}})
        assert main(["stage", "--predictions", str(predictions), "--config", str(config)]) == 2

    def test_missing_manifest_path(self, workdir: Path, predictions: Path):
        assert main(["calibrate", "--predictions", str(predictions), "--manifest", "nowhere.json"]) == 2

    def test_command_needs_manifest(self, workdir: Path, predictions: Path):
        assert main(["calibrate", "--predictions", str(predictions), "--output-dir", str(workdir)]) == 2

    def test_bad_prediction_file(self, workdir: Path):
        bad = workdir / "bad.csv"
        bad.write_text("A,0,0,0,1.5\n", encoding="utf-8")
        assert main(["stage", "--predictions", str(bad), "--output-dir", str(workdir)]) == 1


class TestThresholdPrecedence:
    """Tests for command-line, file, config and default thresholds."""

    @staticmethod
    def _args(**kwargs: object) -> argparse.Namespace:
        return argparse.Namespace(**{"thresholds": None, "tau1": None, "tau2": None, **kwargs})

    def test_mode_defaults(self, workdir: Path):
        assert _thresholds(load_settings(), self._args()) == Thresholds(tau1=0.37, tau2=0.66)
        contrast = _thresholds(load_settings(mode="contrast"), self._args())
        assert (contrast.tau1, contrast.tau2) == (0.35, 0.70)

    def test_config_over_defaults(self, workdir: Path):
        settings = load_settings(_config(workdir / "c.json", {"staging": {"tau1": 0.25}}))
        thresholds = _thresholds(settings, self._args())
        assert (thresholds.tau1, thresholds.tau2) == (0.25, 0.66)

    def test_file_over_config(self, workdir: Path):
        settings = load_settings(_config(workdir / "c.json", {"staging": {"tau1": 0.25, "tau2": 0.5}}))
        Thresholds(tau1=0.2, tau2=0.8).save(workdir / "t.json")
        thresholds = _thresholds(settings, self._args(thresholds=str(workdir / "t.json")))
        assert (thresholds.tau1, thresholds.tau2) == (0.2, 0.8)

    def test_command_line_over_everything(self, workdir: Path):
        settings = load_settings(_config(workdir / "c.json", {"staging": {"tau1": 0.25}}))
        Thresholds(tau1=0.2, tau2=0.8).save(workdir / "t.json")
        thresholds = _thresholds(settings, self._args(thresholds=str(workdir / "t.json"), tau1=0.6))
        assert (thresholds.tau1, thresholds.tau2) == (0.6, 0.8)

    def test_stage_command_uses_cli_tau(self, workdir: Path, predictions: Path):
        config = _config(workdir / "c.json", {"staging": {"tau2": 0.9}})
        argv = ["stage", "--predictions", str(predictions), "--config", str(config), "--output-dir", str(workdir)]
        assert main(argv) == 0
        assert not read_staging_report(workdir / "staging_report.csv")[0].task1_positive
        assert main([*argv, "--tau2", "0.7"]) == 0
        assert read_staging_report(workdir / "staging_report.csv")[0].task1_positive
