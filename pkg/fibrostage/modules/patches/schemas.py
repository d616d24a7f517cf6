"""Patch models and extraction settings."""

from typing import Any, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fibrostage.modules.patches.constants import DEFAULT_MIN_COVERAGE, DEFAULT_PATCH_SIZE, DEFAULT_STRIDE


class PatchExtractionConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    patch_size: int = Field(default=DEFAULT_PATCH_SIZE, ge=1)
    stride: int = Field(default=DEFAULT_STRIDE, ge=1)
    min_coverage: float = Field(default=DEFAULT_MIN_COVERAGE, gt=0, le=1)
    intensity_norm: Literal["zscore_mask"] = "zscore_mask"

    @model_validator(mode="after")
    def validate_stride(self) -> Self:
        if self.stride > self.patch_size:
            msg = f"stride {self.stride} must not exceed patch_size {self.patch_size}"
            raise ValueError(msg)
        return self


class Patch(BaseModel):
    """One K-channel axial window of a subject.

    ``data`` is laid out ``[channel, y, x]``; ``support`` marks the window pixels inside the
    organ mask.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    subject_id: str
    slice_index: int = Field(..., ge=0)
    grid_xy: tuple[int, int] = Field(..., description="(x, y) voxel of the window's first corner")
    data: np.ndarray
    support: np.ndarray
    coverage: float = Field(..., ge=0, le=1)
    channels: tuple[str, ...]
    label: Literal[0, 1] | None = None
    augmentation: str | None = Field(default=None, description="Dihedral transform applied, if any")

    @field_validator("data", mode="before")
    @classmethod
    def validate_data(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=np.float32, copy=True)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            msg = f"patch data must be K x S x S, got shape {arr.shape}"
            raise ValueError(msg)
        arr.setflags(write=False)
        return arr

    @field_validator("support", mode="before")
    @classmethod
    def validate_support(cls, v: Any) -> np.ndarray:
        arr = (np.asarray(v) != 0).astype(np.uint8)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_layout(self) -> Self:
        if self.support.shape != self.data.shape[1:]:
            msg = f"support shape {self.support.shape} does not match patch {self.data.shape[1:]}"
            raise ValueError(msg)
        if len(self.channels) != self.data.shape[0]:
            msg = f"{len(self.channels)} channel names for {self.data.shape[0]} channels"
            raise ValueError(msg)
        return self

    @property
    def x(self) -> int:
        return self.grid_xy[0]

    @property
    def y(self) -> int:
        return self.grid_xy[1]

    @property
    def size(self) -> int:
        return int(self.data.shape[1])

    @property
    def n_channels(self) -> int:
        return int(self.data.shape[0])
