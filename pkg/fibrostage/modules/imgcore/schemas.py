"""Pydantic models for volumes, masks and studies."""

from enum import Enum
from typing import Any, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fibrostage.modules.imgcore.constants import (
    CANONICAL_MODALITIES,
    CONTRAST_CHANNELS,
    GEOMETRY_ATOL,
    GEOMETRY_RTOL,
    MASK_DTYPE,
    NONCONTRAST_CHANNELS,
    REFERENCE_MODALITY,
    STORAGE_DTYPE,
)

Triple = tuple[float, float, float]


def _as_header_float(value: float) -> float:
    # NIfTI-1 keeps geometry as float32; quantizing here makes save/load an exact identity
    return float(np.float32(value))


class ContrastMode(str, Enum):
    """Channel layout of a run."""

    NONCONTRAST = "noncontrast"
    CONTRAST = "contrast"

    @property
    def channels(self) -> tuple[str, ...]:
        """Ordered channel names stacked into patches for this mode."""
        if self is ContrastMode.CONTRAST:
            return CONTRAST_CHANNELS
        return NONCONTRAST_CHANNELS


class Geometry(BaseModel):
    """Axis-aligned voxel grid: size, spacing (mm/voxel) and origin (mm of voxel 0)."""

    model_config = ConfigDict(frozen=True)

    dims: tuple[int, int, int] = Field(..., description="Voxels per axis (x, y, z)")
    spacing: Triple = Field(default=(1.0, 1.0, 1.0), description="Voxel size in mm")
    origin: Triple = Field(default=(0.0, 0.0, 0.0), description="Physical position of voxel (0, 0, 0) in mm")

    @field_validator("dims")
    @classmethod
    def validate_dims(cls, v: tuple[int, int, int]) -> tuple[int, int, int]:
        if any(d < 1 for d in v):
            msg = f"dims must be positive, got {v}"
            raise ValueError(msg)
        return v

    @field_validator("spacing")
    @classmethod
    def validate_spacing(cls, v: Triple) -> Triple:
        if not all(np.isfinite(s) and s > 0 for s in v):
            msg = f"spacing must be finite and strictly positive, got {v}"
            raise ValueError(msg)
        return (_as_header_float(v[0]), _as_header_float(v[1]), _as_header_float(v[2]))

    @field_validator("origin")
    @classmethod
    def validate_origin(cls, v: Triple) -> Triple:
        if not all(np.isfinite(o) for o in v):
            msg = f"origin must be finite, got {v}"
            raise ValueError(msg)
        return (_as_header_float(v[0]), _as_header_float(v[1]), _as_header_float(v[2]))

    @property
    def n_voxels(self) -> int:
        return self.dims[0] * self.dims[1] * self.dims[2]

    @property
    def extent(self) -> np.ndarray:
        """Physical size of the grid in mm (dims * spacing)."""
        return np.asarray(self.dims, dtype=np.float64) * np.asarray(self.spacing, dtype=np.float64)

    @property
    def center(self) -> np.ndarray:
        """Physical position of the grid center in mm."""
        half = (np.asarray(self.dims, dtype=np.float64) - 1.0) / 2.0
        return np.asarray(self.voxel_to_world(half), dtype=np.float64)

    def world_to_voxel(self, point: Any) -> Triple:
        """Continuous voxel index of a physical point; out-of-bounds results are legal."""
        p = np.asarray(point, dtype=np.float64)
        idx = (p - np.asarray(self.origin)) / np.asarray(self.spacing)
        return (float(idx[0]), float(idx[1]), float(idx[2]))

    def voxel_to_world(self, index: Any) -> Triple:
        """Physical position of a (possibly fractional) voxel index."""
        i = np.asarray(index, dtype=np.float64)
        p = np.asarray(self.origin) + i * np.asarray(self.spacing)
        return (float(p[0]), float(p[1]), float(p[2]))

    def affine(self) -> np.ndarray:
        """4x4 voxel-to-world matrix (diagonal spacing, origin translation)."""
        aff = np.eye(4, dtype=np.float64)
        aff[:3, :3] = np.diag(self.spacing)
        aff[:3, 3] = self.origin
        return aff

    def matches(self, other: "Geometry") -> bool:
        """Same dims and (to header precision) the same spacing and origin."""
        return (
            self.dims == other.dims
            and bool(np.allclose(self.spacing, other.spacing, rtol=GEOMETRY_RTOL, atol=GEOMETRY_ATOL))
            and bool(np.allclose(self.origin, other.origin, rtol=GEOMETRY_RTOL, atol=GEOMETRY_ATOL))
        )


class Volume(BaseModel):
    """Scalar 3-D image; ``data[x, y, z]`` so the x index varies fastest on disk."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    geometry: Geometry
    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def validate_data(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=STORAGE_DTYPE, copy=True)
        if arr.ndim != 3:
            msg = f"Volume data must be 3-D, got shape {arr.shape}"
            raise ValueError(msg)
        if not np.all(np.isfinite(arr)):
            msg = "Volume intensities must be finite"
            raise ValueError(msg)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_shape(self) -> Self:
        if tuple(self.data.shape) != self.geometry.dims:
            msg = f"data shape {self.data.shape} does not match dims {self.geometry.dims}"
            raise ValueError(msg)
        return self

    @classmethod
    def from_flat(cls, geometry: Geometry, values: Any) -> "Volume":
        """Build a volume from an x-fastest flat array of length prod(dims)."""
        flat = np.asarray(values, dtype=STORAGE_DTYPE).ravel()
        if flat.size != geometry.n_voxels:
            msg = f"expected {geometry.n_voxels} values for dims {geometry.dims}, got {flat.size}"
            raise ValueError(msg)
        return cls(geometry=geometry, data=flat.reshape(geometry.dims, order="F"))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.geometry.dims

    @property
    def spacing(self) -> Triple:
        return self.geometry.spacing

    @property
    def origin(self) -> Triple:
        return self.geometry.origin

    def flat(self) -> np.ndarray:
        """Intensities in x-fastest order."""
        return self.data.ravel(order="F")

    def with_data(self, data: Any) -> "Volume":
        """Same grid, new intensities."""
        return Volume(geometry=self.geometry, data=data)


class Mask(BaseModel):
    """Binary organ mask (0 = background, 1 = organ). Any nonzero input reads as 1."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    geometry: Geometry
    data: np.ndarray

    @field_validator("data", mode="before")
    @classmethod
    def validate_data(cls, v: Any) -> np.ndarray:
        raw = np.asarray(v)
        if raw.ndim != 3:
            msg = f"Mask data must be 3-D, got shape {raw.shape}"
            raise ValueError(msg)
        arr = (raw != 0).astype(MASK_DTYPE)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_shape(self) -> Self:
        if tuple(self.data.shape) != self.geometry.dims:
            msg = f"mask shape {self.data.shape} does not match dims {self.geometry.dims}"
            raise ValueError(msg)
        return self

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.geometry.dims

    @property
    def spacing(self) -> Triple:
        return self.geometry.spacing

    @property
    def origin(self) -> Triple:
        return self.geometry.origin

    @property
    def voxels(self) -> np.ndarray:
        """Boolean view of the mask."""
        return self.data.astype(bool)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.data))

    @property
    def is_empty(self) -> bool:
        return self.count == 0

    def bounding_box(self) -> tuple[tuple[int, int, int], tuple[int, int, int]] | None:
        """Inclusive (min, max) voxel corners of the mask, or None when empty."""
        nz = np.nonzero(self.data)
        if nz[0].size == 0:
            return None
        lo = (int(nz[0].min()), int(nz[1].min()), int(nz[2].min()))
        hi = (int(nz[0].max()), int(nz[1].max()), int(nz[2].max()))
        return lo, hi


class Study(BaseModel):
    """One subject: modality volumes in canonical order, optional mask and stage."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subject_id: str = Field(..., min_length=1)
    modalities: dict[str, Volume]
    mask: Mask | None = None
    stage: int | None = Field(default=None, ge=1, le=4)
    contrast_mode: ContrastMode = ContrastMode.NONCONTRAST
    group: str | None = Field(default=None, description="Optional cohort tag, e.g. ID or OOD")

    @field_validator("modalities")
    @classmethod
    def validate_modalities(cls, v: dict[str, Volume]) -> dict[str, Volume]:
        unknown = sorted(set(v) - set(CANONICAL_MODALITIES))
        if unknown:
            msg = f"unknown modalities {unknown}; expected a subset of {list(CANONICAL_MODALITIES)}"
            raise ValueError(msg)
        if REFERENCE_MODALITY not in v:
            msg = f"{REFERENCE_MODALITY} is required for every study"
            raise ValueError(msg)
        return {name: v[name] for name in CANONICAL_MODALITIES if name in v}

    @model_validator(mode="after")
    def validate_mask_geometry(self) -> Self:
        if self.mask is not None and not self.mask.geometry.matches(self.reference.geometry):
            msg = f"mask geometry {self.mask.geometry} does not match {REFERENCE_MODALITY} geometry"
            raise ValueError(msg)
        return self

    @property
    def reference(self) -> Volume:
        """The GED4 volume every other modality is aligned to."""
        return self.modalities[REFERENCE_MODALITY]

    @property
    def channels(self) -> tuple[str, ...]:
        return self.contrast_mode.channels

    def missing_channels(self) -> list[str]:
        """Channels of the run's mode that this subject lacks (zero-filled downstream)."""
        return [name for name in self.channels if name not in self.modalities]
