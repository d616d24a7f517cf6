"""Pydantic models for histogram configuration, patch grids and joint histograms."""

from enum import Enum
from typing import Any, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fibrostage.modules.imgcore.schemas import Mask
from fibrostage.modules.mi.constants import (
    DEFAULT_BINS,
    DEFAULT_EPSILON,
    DEFAULT_KERNEL_WIDTH,
    DEFAULT_PATCH_SIZE,
    DEFAULT_PATCH_STRIDE,
    DEFAULT_PERCENTILES,
    JOINT_SUM_TOL,
    MARGINAL_TOL,
)

Range = tuple[float, float]


class BinningMode(str, Enum):
    """Histogram estimator."""

    HARD = "hard"
    SOFT = "soft"


class HistogramConfig(BaseModel):
    """Binning of a fixed/moving intensity pair."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    bins: int = Field(default=DEFAULT_BINS, ge=2, description="Intensity bins per image")
    intensity_range: tuple[Range, Range] | None = Field(
        default=None,
        description="(min, max) per image (fixed, moving); None means robust percentiles over the mask",
    )
    epsilon: float = Field(default=DEFAULT_EPSILON, gt=0, description="Stabilizer inside the MI logarithm")
    kernel_width: float = Field(default=DEFAULT_KERNEL_WIDTH, gt=0, description="Parzen width in bins")
    log_base: Literal["natural"] = "natural"
    percentiles: Range = Field(default=DEFAULT_PERCENTILES, description="Percentiles used when no range is given")

    @field_validator("intensity_range")
    @classmethod
    def validate_range(cls, v: tuple[Range, Range] | None) -> tuple[Range, Range] | None:
        if v is None:
            return v
        for lo, hi in v:
            if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
                msg = f"intensity range must satisfy min < max, got ({lo}, {hi})"
                raise ValueError(msg)
        return v

    @field_validator("percentiles")
    @classmethod
    def validate_percentiles(cls, v: Range) -> Range:
        if not 0.0 <= v[0] < v[1] <= 100.0:
            msg = f"percentiles must satisfy 0 <= low < high <= 100, got {v}"
            raise ValueError(msg)
        return v

    def swapped(self) -> "HistogramConfig":
        """Same binning with the fixed/moving roles exchanged."""
        if self.intensity_range is None:
            return self
        x_range, y_range = self.intensity_range
        return self.model_copy(update={"intensity_range": (y_range, x_range)})


class PatchGrid(BaseModel):
    """Regular lattice of 3-D patches, optionally restricted to a mask."""

    model_config = ConfigDict(frozen=True, extra="forbid", arbitrary_types_allowed=True)

    patch_size: tuple[int, int, int] = Field(default=DEFAULT_PATCH_SIZE)
    stride: tuple[int, int, int] = Field(default=DEFAULT_PATCH_STRIDE)
    restriction_mask: Mask | None = Field(default=None, description="Only patches centred inside count")

    @model_validator(mode="after")
    def validate_lattice(self) -> Self:
        if any(p < 1 for p in self.patch_size) or any(s < 1 for s in self.stride):
            msg = f"patch_size and stride must be positive, got {self.patch_size} / {self.stride}"
            raise ValueError(msg)
        if any(s > p for s, p in zip(self.stride, self.patch_size, strict=True)):
            msg = f"stride {self.stride} must not exceed patch_size {self.patch_size}"
            raise ValueError(msg)
        return self

    def fitted(self, dims: tuple[int, int, int]) -> "PatchGrid":
        """Grid clamped so that at least one patch fits along every axis of ``dims``."""
        size = tuple(min(p, d) for p, d in zip(self.patch_size, dims, strict=True))
        stride = tuple(min(s, p) for s, p in zip(self.stride, size, strict=True))
        return self.model_copy(update={"patch_size": size, "stride": stride})

    def with_mask(self, mask: Mask | None) -> "PatchGrid":
        return self.model_copy(update={"restriction_mask": mask})


class JointHistogram(BaseModel):
    """Normalized joint histogram with its marginals."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    joint: np.ndarray
    marginal_x: np.ndarray
    marginal_y: np.ndarray

    @field_validator("joint", "marginal_x", "marginal_y", mode="before")
    @classmethod
    def validate_array(cls, v: Any) -> np.ndarray:
        arr = np.array(v, dtype=np.float64, copy=True)
        arr.setflags(write=False)
        return arr

    @model_validator(mode="after")
    def validate_probabilities(self) -> Self:
        joint = self.joint
        if joint.ndim != 2 or joint.shape[0] != joint.shape[1]:
            msg = f"joint histogram must be square, got shape {joint.shape}"
            raise ValueError(msg)
        if np.any(joint < 0):
            msg = "joint histogram entries must be nonnegative"
            raise ValueError(msg)
        if abs(float(joint.sum()) - 1.0) > JOINT_SUM_TOL:
            msg = f"joint histogram must sum to 1, got {joint.sum()!r}"
            raise ValueError(msg)
        if not np.allclose(self.marginal_x, joint.sum(axis=1), rtol=0, atol=MARGINAL_TOL):
            msg = "marginal_x must equal the row sums of the joint histogram"
            raise ValueError(msg)
        if not np.allclose(self.marginal_y, joint.sum(axis=0), rtol=0, atol=MARGINAL_TOL):
            msg = "marginal_y must equal the column sums of the joint histogram"
            raise ValueError(msg)
        return self

    @classmethod
    def from_joint(cls, joint: Any) -> "JointHistogram":
        """Derive marginals from a normalized joint table."""
        table = np.asarray(joint, dtype=np.float64)
        return cls(joint=table, marginal_x=table.sum(axis=1), marginal_y=table.sum(axis=0))

    @property
    def bins(self) -> int:
        return int(self.joint.shape[0])

    def transposed(self) -> "JointHistogram":
        """Histogram of the pair with X and Y exchanged."""
        return JointHistogram(joint=self.joint.T, marginal_x=self.marginal_y, marginal_y=self.marginal_x)
