"""Shared phantom cohort and CLI runner for the end-to-end tests."""

from pathlib import Path

import pytest

from fibrostage.cli import main
from tests.integration.helpers import PHANTOM_BASE, RUN_CONFIG, Runner, write_json

COHORT = {
    "base": PHANTOM_BASE,
    "entries": [
        {"lesion_fraction": 0.05, "stage": 1, "count": 10, "group": "low"},
        {"lesion_fraction": 0.45, "stage": 2, "count": 10, "group": "mid"},
        {"lesion_fraction": 0.85, "stage": 4, "count": 10, "group": "high"},
    ],
}


@pytest.fixture(scope="session")
def run_config(tmp_path_factory: pytest.TempPathFactory) -> Path:
    return write_json(tmp_path_factory.mktemp("config") / "config.json", RUN_CONFIG)


@pytest.fixture(scope="session")
def run(run_config: Path) -> Runner:
    """Invoke the CLI with the test configuration; a later --config wins."""

    def invoke(command: str, *args: str | Path) -> int:
        return main([command, "--config", str(run_config), *(str(a) for a in args)])

    return invoke


@pytest.fixture(scope="session")
def cohort_manifest(run: Runner, tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Thirty phantom subjects: ten each at lesion fractions 0.05 (S1), 0.45 (S2) and 0.85 (S4)."""
    root = tmp_path_factory.mktemp("cohort")
    cohort = write_json(root / "cohort.json", COHORT)
    assert run("phantom", "--cohort", cohort, "--output-dir", root) == 0
    return root / "phantom" / "manifest.json"


@pytest.fixture(scope="session")
def pipeline_dir(run: Runner, cohort_manifest: Path, tmp_path_factory: pytest.TempPathFactory) -> Path:
    """Output directory of one full pipeline run with the built-in classifier."""
    out = tmp_path_factory.mktemp("pipeline")
    assert run("pipeline", "--manifest", cohort_manifest, "--output-dir", out) == 0
    return out
