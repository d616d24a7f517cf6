"""Tests for NIfTI reading and writing."""

from pathlib import Path

import numpy as np
import pytest

from fibrostage.core.errors import ImageIOError
from fibrostage.modules.imgcore import Geometry, Mask, Volume, load_mask, load_volume, save_mask, save_volume


class TestVolumeIO:
    """Tests for load_volume / save_volume."""

    def test_save_load_is_exact(self, tmp_path: Path, smooth_volume: Volume):
        path = tmp_path / "vol.nii"
        save_volume(smooth_volume, path)
        loaded = load_volume(path)
        assert loaded.geometry == smooth_volume.geometry
        assert np.array_equal(loaded.data, smooth_volume.data)

    def test_int16_with_scaling(self, write_nifti):
        data = np.arange(8, dtype=np.int16).reshape(2, 2, 2)
        path = write_nifti("scaled.nii", data, np.diag([2.0, 2.0, 2.0, 1.0]))
        # scl_slope and scl_inter live at bytes 112..120 of the NIfTI-1 header
        raw = bytearray(path.read_bytes())
        raw[112:120] = np.array([0.5, 10.0], dtype="<f4").tobytes()
        path.write_bytes(bytes(raw))
        vol = load_volume(path)
        assert vol.data[1, 1, 1] == pytest.approx(10.0 + 0.5 * 7)
        assert vol.spacing == (2.0, 2.0, 2.0)

    def test_uint8_payload(self, write_nifti):
        path = write_nifti("u8.nii", np.full((3, 2, 2), 4, dtype=np.uint8))
        assert load_volume(path).data.max() == 4.0

    def test_unsupported_dtype(self, write_nifti):
        path = write_nifti("f64.nii", np.zeros((2, 2, 2), dtype=np.float64))
        with pytest.raises(ImageIOError):
            _ = load_volume(path)

    def test_gzip_rejected(self, tmp_path: Path, smooth_volume: Volume):
        with pytest.raises(ImageIOError):
            save_volume(smooth_volume, tmp_path / "vol.nii.gz")

    def test_missing_file(self, tmp_path: Path):
        with pytest.raises(ImageIOError):
            _ = load_volume(tmp_path / "missing.nii")

    def test_not_3d(self, write_nifti):
        path = write_nifti("4d.nii", np.zeros((2, 2, 2, 2), dtype=np.float32))
        with pytest.raises(ImageIOError):
            _ = load_volume(path)

    def test_oblique_rejected(self, write_nifti):
        angle = 0.3
        affine = np.eye(4)
        affine[:2, :2] = [[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]]
        path = write_nifti("oblique.nii", np.zeros((2, 2, 2), dtype=np.float32), affine)
        with pytest.raises(ImageIOError):
            _ = load_volume(path)

    def test_non_finite_rejected(self, write_nifti):
        data = np.zeros((2, 2, 2), dtype=np.float32)
        data[0, 1, 1] = np.nan
        path = write_nifti("nan.nii", data)
        with pytest.raises(ImageIOError):
            _ = load_volume(path)

    def test_truncated_payload(self, tmp_path: Path, smooth_volume: Volume):
        path = tmp_path / "vol.nii"
        save_volume(smooth_volume, path)
        path.write_bytes(path.read_bytes()[:-100])
        with pytest.raises(ImageIOError):
            _ = load_volume(path)


class TestMaskIO:
    """Tests for load_mask / save_mask."""

    def test_round_trip(self, tmp_path: Path):
        geo = Geometry(dims=(3, 3, 2), spacing=(0.5, 0.5, 1.0))
        data = np.zeros(geo.dims, dtype=np.uint8)
        data[1, 1, :] = 1
        save_mask(Mask(geometry=geo, data=data), tmp_path / "m.nii")
        loaded = load_mask(tmp_path / "m.nii")
        assert np.array_equal(loaded.data, data)

    def test_nonzero_labels_binarized(self, write_nifti):
        path = write_nifti("labels.nii", np.array([[[0, 3]], [[2, 0]]], dtype=np.uint8))
        assert load_mask(path).data.tolist() == [[[0, 1]], [[1, 0]]]
