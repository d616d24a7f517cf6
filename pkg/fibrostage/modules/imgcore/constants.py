"""Constants and error messages for the image core module."""

import numpy as np

# Canonical channel order; identical for every study in a run
CANONICAL_MODALITIES: tuple[str, ...] = ("T1", "T2", "DWI", "GED1", "GED2", "GED3", "GED4")

# Hepatobiliary phase, acquired for every subject and used as the registration reference
REFERENCE_MODALITY = "GED4"

NONCONTRAST_CHANNELS: tuple[str, ...] = ("T1", "T2", "DWI")
CONTRAST_CHANNELS: tuple[str, ...] = CANONICAL_MODALITIES

# On-disk payload types accepted by the NIfTI reader, as (kind, itemsize)
SUPPORTED_NIFTI_TYPES: dict[tuple[str, int], str] = {
    ("u", 1): "uint8",
    ("i", 2): "int16",
    ("f", 4): "float32",
}

# Storage type of every volume; all accumulation happens in float64
STORAGE_DTYPE = np.float32
MASK_DTYPE = np.uint8

# Relative/absolute tolerance for deciding two grids are the same
GEOMETRY_RTOL = 1e-6
GEOMETRY_ATOL = 1e-6

# Off-diagonal affine entries below this (mm) count as zero
AXIS_ALIGNED_ATOL = 1e-6

ERROR_MESSAGES = {
    "FILE_NOT_FOUND": "Volume file not found: {path}",
    "UNSUPPORTED_FORMAT": "Unsupported volume format for {path}: only uncompressed single-file .nii is supported",
    "UNREADABLE": "Cannot read NIfTI file {path}: {error}",
    "UNSUPPORTED_DTYPE": "Unsupported NIfTI datatype {dtype} in {path}; expected uint8, int16 or float32",
    "NOT_3D": "Expected a 3-D volume in {path}, got shape {shape}",
    "OBLIQUE": "Oblique orientation in {path} is not supported (affine {affine})",
    "PAYLOAD_MISMATCH": "Payload of {path} does not match its header: {error}",
    "NON_FINITE": "Volume {path} contains non-finite intensities",
    "UNWRITABLE": "Cannot write volume to {path}: {error}",
    "MANIFEST_UNREADABLE": "Cannot read manifest {path}: {error}",
    "MANIFEST_RECORD": "Invalid manifest record #{index} ({subject}): {error}",
    "MISSING_REFERENCE": "Subject {subject} has no GED4 volume; GED4 is required for every study",
    "GEOMETRY_MISMATCH": "{what} geometry {got} does not match {expected}",
}
