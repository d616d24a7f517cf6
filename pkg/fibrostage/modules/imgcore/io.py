"""Minimal NIfTI-1 reading and writing on top of nibabel.

Only uncompressed single-file ``.nii`` images with uint8/int16/float32 payloads and
axis-aligned orientation are accepted. ``scl_slope``/``scl_inter`` are applied on read.
"""

from pathlib import Path

import nibabel as nib
import numpy as np
from nibabel.filebasedimages import ImageFileError
from pydantic import ValidationError

from fibrostage.core.errors import ImageIOError
from fibrostage.core.logger import get_logger
from fibrostage.modules.imgcore.constants import (
    AXIS_ALIGNED_ATOL,
    ERROR_MESSAGES,
    MASK_DTYPE,
    STORAGE_DTYPE,
    SUPPORTED_NIFTI_TYPES,
)
from fibrostage.modules.imgcore.schemas import Geometry, Mask, Volume

logger = get_logger("modules.imgcore.io")


def _check_nii_path(path: Path) -> None:
    if path.name.lower().endswith(".nii.gz") or path.suffix.lower() != ".nii":
        msg = ERROR_MESSAGES["UNSUPPORTED_FORMAT"].format(path=path)
        raise ImageIOError(msg)


def _read_nifti(path: str | Path) -> tuple[Geometry, np.ndarray]:
    """Read geometry and float64 intensities (scaling applied) from a .nii file."""
    path = Path(path)
    _check_nii_path(path)
    if not path.is_file():
        msg = ERROR_MESSAGES["FILE_NOT_FOUND"].format(path=path)
        raise ImageIOError(msg)

    try:
        img = nib.load(path, mmap=False)
    except (ImageFileError, OSError, ValueError) as e:
        msg = ERROR_MESSAGES["UNREADABLE"].format(path=path, error=e)
        raise ImageIOError(msg) from e
    if not isinstance(img, nib.Nifti1Image):
        msg = ERROR_MESSAGES["UNSUPPORTED_FORMAT"].format(path=path)
        raise ImageIOError(msg)

    dtype = np.dtype(img.header.get_data_dtype())
    if (dtype.kind, dtype.itemsize) not in SUPPORTED_NIFTI_TYPES:
        msg = ERROR_MESSAGES["UNSUPPORTED_DTYPE"].format(dtype=dtype, path=path)
        raise ImageIOError(msg)

    shape = tuple(int(s) for s in img.shape)
    if len(shape) != 3:
        msg = ERROR_MESSAGES["NOT_3D"].format(path=path, shape=shape)
        raise ImageIOError(msg)

    # Permuted/flipped axis-aligned grids become RAS+ diagonal; oblique ones stay non-diagonal
    canonical = nib.as_closest_canonical(img)
    affine = np.asarray(canonical.affine, dtype=np.float64)
    rotation = affine[:3, :3]
    off_diagonal = rotation - np.diag(np.diag(rotation))
    if np.any(np.abs(off_diagonal) > AXIS_ALIGNED_ATOL) or np.any(np.diag(rotation) <= 0):
        msg = ERROR_MESSAGES["OBLIQUE"].format(path=path, affine=affine.tolist())
        raise ImageIOError(msg)

    try:
        data = np.asarray(canonical.get_fdata(dtype=np.float64))
    except (OSError, ValueError, EOFError) as e:
        msg = ERROR_MESSAGES["PAYLOAD_MISMATCH"].format(path=path, error=e)
        raise ImageIOError(msg) from e

    if not np.all(np.isfinite(data)):
        msg = ERROR_MESSAGES["NON_FINITE"].format(path=path)
        raise ImageIOError(msg)

    geometry = Geometry(
        dims=(int(data.shape[0]), int(data.shape[1]), int(data.shape[2])),
        spacing=(float(rotation[0, 0]), float(rotation[1, 1]), float(rotation[2, 2])),
        origin=(float(affine[0, 3]), float(affine[1, 3]), float(affine[2, 3])),
    )
    logger.debug("Read %s: dims=%s spacing=%s dtype=%s", path, geometry.dims, geometry.spacing, dtype)
    return geometry, data


def _write_nifti(geometry: Geometry, data: np.ndarray, path: str | Path) -> None:
    path = Path(path)
    _check_nii_path(path)
    img = nib.Nifti1Image(data, geometry.affine())
    img.header.set_data_dtype(data.dtype)
    img.header.set_xyzt_units(xyz="mm")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        nib.save(img, path)
    except OSError as e:
        msg = ERROR_MESSAGES["UNWRITABLE"].format(path=path, error=e)
        raise ImageIOError(msg) from e


def load_volume(path: str | Path) -> Volume:
    """Load a scalar volume; intensities are stored as float32.

    Raises:
        ImageIOError: unreadable file, unsupported type/format, header/payload mismatch,
            oblique orientation or non-finite intensities
    """
    geometry, data = _read_nifti(path)
    try:
        return Volume(geometry=geometry, data=data)
    except ValidationError as e:
        msg = ERROR_MESSAGES["UNREADABLE"].format(path=path, error=e)
        raise ImageIOError(msg) from e


def save_volume(volume: Volume, path: str | Path) -> None:
    """Write ``volume`` as float32 NIfTI-1; load_volume reproduces it exactly."""
    _write_nifti(volume.geometry, np.asarray(volume.data, dtype=STORAGE_DTYPE), path)


def load_mask(path: str | Path) -> Mask:
    """Load a mask; any nonzero voxel reads as 1."""
    geometry, data = _read_nifti(path)
    return Mask(geometry=geometry, data=data != 0)


def save_mask(mask: Mask, path: str | Path) -> None:
    """Write ``mask`` as uint8 NIfTI-1."""
    _write_nifti(mask.geometry, np.asarray(mask.data, dtype=MASK_DTYPE), path)
