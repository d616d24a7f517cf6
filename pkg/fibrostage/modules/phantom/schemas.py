"""Phantom specifications and generated bundles."""

from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fibrostage.modules.imgcore.constants import NONCONTRAST_CHANNELS, REFERENCE_MODALITY
from fibrostage.modules.imgcore.schemas import ContrastMode, Mask, Study
from fibrostage.modules.phantom.constants import (
    DEFAULT_CHANNEL_MAPS,
    DEFAULT_DIMS,
    DEFAULT_LESION_SEEDS,
    DEFAULT_NOISE_SIGMA,
    DEFAULT_SEMI_AXES,
    DEFAULT_SMOOTHING,
    DEFAULT_SPACING,
    DEFAULT_TEXTURE_CONTRAST,
)
from fibrostage.modules.reg.schemas import RigidTransform

Triple = tuple[float, float, float]


class ChannelMap(BaseModel):
    """Monotone intensity remap ``offset + scale * clip(v / vmax, 0, 1) ** gamma``.

    A negative ``scale`` inverts the contrast, as between T1- and T2-weighted images.
    """

    model_config = ConfigDict(frozen=True)

    offset: float = 0.0
    scale: float = 1.0
    gamma: float = Field(default=1.0, gt=0)

    @field_validator("scale")
    @classmethod
    def validate_scale(cls, v: float) -> float:
        if v == 0 or not np.isfinite(v):
            msg = f"scale must be finite and non-zero, got {v}"
            raise ValueError(msg)
        return v

    def apply(self, values: np.ndarray, vmax: float) -> np.ndarray:
        scaled = np.clip(values / vmax, 0.0, 1.0)
        return self.offset + self.scale * scaled**self.gamma


def _default_maps() -> dict[str, ChannelMap]:
    return {
        name: ChannelMap(offset=o, scale=s, gamma=g)
        for name, (o, s, g) in DEFAULT_CHANNEL_MAPS.items()
    }


class Ellipsoid(BaseModel):
    model_config = ConfigDict(frozen=True)

    center: Triple | None = Field(default=None, description="mm; None means the grid center")
    semi_axes: Triple = DEFAULT_SEMI_AXES

    @field_validator("semi_axes")
    @classmethod
    def validate_axes(cls, v: Triple) -> Triple:
        if any(a <= 0 for a in v):
            msg = f"semi-axes must be positive, got {v}"
            raise ValueError(msg)
        return v


class PhantomSpec(BaseModel):
    """Everything needed to render one synthetic subject deterministically."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    subject_id: str = "phantom"
    dims: tuple[int, int, int] = DEFAULT_DIMS
    spacing: Triple = DEFAULT_SPACING
    organ: Ellipsoid = Field(default_factory=Ellipsoid)
    lesion_fraction: float = Field(default=0.0, ge=0.0, le=1.0)
    lesion_seeds: int = Field(default=DEFAULT_LESION_SEEDS, ge=1)
    texture_contrast: float = Field(default=DEFAULT_TEXTURE_CONTRAST, ge=0.0)
    modalities: tuple[str, ...] = NONCONTRAST_CHANNELS
    modality_maps: dict[str, ChannelMap] = Field(default_factory=_default_maps)
    planted_transforms: dict[str, RigidTransform] = Field(default_factory=dict)
    noise_sigma: float = Field(default=DEFAULT_NOISE_SIGMA, ge=0.0)
    smoothing: float = Field(default=DEFAULT_SMOOTHING, ge=0.0)
    seed: int = 0
    stage: int | None = Field(default=None, ge=1, le=4)
    group: str | None = None
    contrast_mode: ContrastMode = ContrastMode.NONCONTRAST

    @model_validator(mode="after")
    def validate_modalities(self) -> Self:
        for name in self.modalities:
            if name != REFERENCE_MODALITY and name not in self.modality_maps:
                msg = f"no intensity map for modality {name}"
                raise ValueError(msg)
        for name in self.planted_transforms:
            if name not in self.modalities or name == REFERENCE_MODALITY:
                msg = f"planted transform for {name}, which is not a generated moving modality"
                raise ValueError(msg)
        return self


class PhantomResult(BaseModel):
    """Generated study plus its ground truth."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    study: Study
    lesion: Mask
    transforms: dict[str, RigidTransform]
    lesion_fraction: float = Field(..., description="Realized lesion voxel fraction of the organ")


class CohortEntry(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lesion_fraction: float = Field(..., ge=0.0, le=1.0)
    stage: int = Field(..., ge=1, le=4)
    count: int = Field(default=1, ge=1)
    group: str | None = None


class CohortSpec(BaseModel):
    """Groups of subjects sharing a lesion fraction and stage, rendered from one base spec."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    base: PhantomSpec = Field(default_factory=PhantomSpec)
    entries: list[CohortEntry]
    misalign: bool = Field(default=False, description="Plant a seeded rigid transform on every moving modality")
