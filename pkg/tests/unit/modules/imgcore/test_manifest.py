"""Tests for manifest reading, study loading and manifest writing."""

import json
from pathlib import Path

import pytest

from fibrostage.core.errors import ManifestError
from fibrostage.modules.imgcore import (
    ContrastMode,
    ManifestRecord,
    Study,
    load_manifest,
    read_manifest_records,
    save_mask,
    save_volume,
    write_manifest,
)


@pytest.fixture
def study_dir(tmp_path: Path, make_study) -> Path:
    study: Study = make_study("S01", stage=2)
    for name, volume in study.modalities.items():
        save_volume(volume, tmp_path / "S01" / f"{name}.nii")
    assert study.mask is not None
    save_mask(study.mask, tmp_path / "S01" / "mask.nii")
    return tmp_path


def _write(path: Path, records: list[dict]) -> Path:
    path.write_text(json.dumps(records), encoding="utf-8")
    return path


class TestManifest:
    """Tests for manifest handling."""

    def test_load(self, study_dir: Path):
        manifest = _write(
            study_dir / "manifest.json",
            [
                {
                    "subject_id": "S01",
                    "stage": 2,
                    "mask": "S01/mask.nii",
                    "modalities": {"GED4": "S01/GED4.nii", "T1": "S01/T1.nii"},
                    "group": "ID",
                }
            ],
        )
        studies = load_manifest(manifest, ContrastMode.NONCONTRAST)
        assert len(studies) == 1
        assert studies[0].stage == 2
        assert studies[0].group == "ID"
        assert list(studies[0].modalities) == ["T1", "GED4"]
        assert studies[0].mask is not None

    def test_missing_reference(self, study_dir: Path):
        manifest = _write(study_dir / "m.json", [{"subject_id": "S01", "modalities": {"T1": "S01/T1.nii"}}])
        with pytest.raises(ManifestError) as exc_info:
            _ = read_manifest_records(manifest)
        assert "GED4" in str(exc_info.value)

    def test_stage_out_of_range(self, study_dir: Path):
        manifest = _write(study_dir / "m.json", [{"subject_id": "S01", "stage": 0, "modalities": {"GED4": "x.nii"}}])
        with pytest.raises(ManifestError):
            _ = read_manifest_records(manifest)

    def test_unknown_field(self, study_dir: Path):
        manifest = _write(study_dir / "m.json", [{"subject_id": "S01", "modalities": {"GED4": "x"}, "extra": 1}])
        with pytest.raises(ManifestError):
            _ = read_manifest_records(manifest)

    def test_missing_file(self, study_dir: Path):
        manifest = _write(study_dir / "m.json", [{"subject_id": "S01", "modalities": {"GED4": "S01/nope.nii"}}])
        with pytest.raises(ManifestError):
            _ = load_manifest(manifest)

    def test_not_an_array(self, tmp_path: Path):
        path = tmp_path / "m.json"
        path.write_text('{"subject_id": "S01"}', encoding="utf-8")
        with pytest.raises(ManifestError):
            _ = read_manifest_records(path)

    def test_write_then_read(self, tmp_path: Path):
        records = [ManifestRecord(subject_id="A", modalities={"GED4": "A/GED4.nii"}, stage=4)]
        write_manifest(records, tmp_path / "out" / "manifest.json")
        loaded = read_manifest_records(tmp_path / "out" / "manifest.json")
        assert loaded == records
        raw = json.loads((tmp_path / "out" / "manifest.json").read_text(encoding="utf-8"))
        assert "mask" not in raw[0]
