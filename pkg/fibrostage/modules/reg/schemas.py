"""Rigid transforms and registration configuration."""

from enum import Enum
from pathlib import Path
from typing import Any, Literal, Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from scipy.spatial.transform import Rotation

from fibrostage.common.utils import load_json
from fibrostage.core.errors import ImageIOError
from fibrostage.modules.mi.schemas import BinningMode, HistogramConfig, PatchGrid
from fibrostage.modules.reg.constants import (
    DEFAULT_CONVERGE_TOL,
    DEFAULT_LEVELS,
    DEFAULT_MIN_STEP,
    DEFAULT_STEP_INIT,
    DEFAULT_STEP_SHRINK,
    ERROR_MESSAGES,
    TRANSFORM_DIGITS,
)

Triple = tuple[float, float, float]
ZERO: Triple = (0.0, 0.0, 0.0)


class RigidTransform(BaseModel):
    """Rotation about ``center`` followed by a translation: ``p -> R (p - c) + c + t``.

    Maps points of the fixed image's physical space to the moving image's physical space.
    ``rotation`` holds extrinsic XYZ Euler angles in radians, ``translation`` and ``center``
    are in mm.
    """

    model_config = ConfigDict(frozen=True)

    rotation: Triple = ZERO
    translation: Triple = ZERO
    center: Triple = ZERO

    @field_validator("rotation", "translation", "center")
    @classmethod
    def validate_finite(cls, v: Triple) -> Triple:
        if not all(np.isfinite(c) for c in v):
            msg = f"transform components must be finite, got {v}"
            raise ValueError(msg)
        return (float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def identity(cls, center: Any = ZERO) -> "RigidTransform":
        c = np.asarray(center, dtype=np.float64)
        return cls(center=(float(c[0]), float(c[1]), float(c[2])))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray, translation: Any, center: Any) -> "RigidTransform":
        angles = Rotation.from_matrix(matrix).as_euler("xyz")
        t = np.asarray(translation, dtype=np.float64)
        c = np.asarray(center, dtype=np.float64)
        return cls(
            rotation=(float(angles[0]), float(angles[1]), float(angles[2])),
            translation=(float(t[0]), float(t[1]), float(t[2])),
            center=(float(c[0]), float(c[1]), float(c[2])),
        )

    @property
    def is_identity(self) -> bool:
        return self.rotation == ZERO and self.translation == ZERO

    def matrix(self) -> np.ndarray:
        """3x3 rotation matrix."""
        if self.rotation == ZERO:
            return np.eye(3)
        return Rotation.from_euler("xyz", self.rotation).as_matrix()

    def apply(self, points: Any) -> np.ndarray:
        """Transform points of shape (..., 3)."""
        p = np.asarray(points, dtype=np.float64)
        c = np.asarray(self.center)
        return (p - c) @ self.matrix().T + c + np.asarray(self.translation)

    def inverse(self) -> "RigidTransform":
        """``q -> R^T (q - c) + c - R^T t``, kept about the same center."""
        r_inv = self.matrix().T
        return RigidTransform.from_matrix(r_inv, -(r_inv @ np.asarray(self.translation)), self.center)

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Transform applying ``other`` first, then ``self``."""
        r1 = self.matrix()
        c1 = np.asarray(self.center)
        c2 = np.asarray(other.center)
        t = r1 @ (c2 + np.asarray(other.translation) - c1) + c1 + np.asarray(self.translation) - c2
        return RigidTransform.from_matrix(r1 @ other.matrix(), t, c2)

    def parameters(self) -> np.ndarray:
        """(rx, ry, rz, tx, ty, tz)."""
        return np.array([*self.rotation, *self.translation], dtype=np.float64)

    def with_parameters(self, params: Any) -> "RigidTransform":
        p = np.asarray(params, dtype=np.float64)
        return RigidTransform(
            rotation=(float(p[0]), float(p[1]), float(p[2])),
            translation=(float(p[3]), float(p[4]), float(p[5])),
            center=self.center,
        )

    def rotation_angle(self) -> float:
        """Magnitude of the rotation in radians."""
        return float(np.linalg.norm(Rotation.from_matrix(self.matrix()).as_rotvec()))

    def to_text(self) -> str:
        """JSON text with every real written to 17 significant digits."""

        def fmt(values: Triple) -> str:
            return "[" + ", ".join(f"{v:.{TRANSFORM_DIGITS}g}" for v in values) + "]"

        return (
            "{\n"
            f'  "rotation": {fmt(self.rotation)},\n'
            f'  "translation": {fmt(self.translation)},\n'
            f'  "center": {fmt(self.center)}\n'
            "}\n"
        )

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_text(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RigidTransform":
        """Read a transform written by :meth:`save`.

        Raises:
            ImageIOError: If the file is missing or malformed.
        """
        try:
            return cls.model_validate(load_json(path))
        except (OSError, ValueError, ValidationError) as e:
            msg = ERROR_MESSAGES["TRANSFORM_UNREADABLE"].format(path=path, error=e)
            raise ImageIOError(msg) from e


class RegistrationConfig(BaseModel):
    """Multi-resolution rigid registration settings."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    levels: tuple[tuple[int, int], ...] = Field(default=DEFAULT_LEVELS, description="(factor, max iterations)")
    step_init: float = Field(default=DEFAULT_STEP_INIT, gt=0, description="Initial step, in level voxels")
    step_shrink: float = Field(default=DEFAULT_STEP_SHRINK, gt=0, lt=1)
    min_step: float = Field(default=DEFAULT_MIN_STEP, gt=0, description="Smallest step, in level voxels")
    converge_tol: float = Field(default=DEFAULT_CONVERGE_TOL, gt=0, description="Relative loss change")
    hist: HistogramConfig = Field(default_factory=HistogramConfig)
    grid: PatchGrid = Field(default_factory=PatchGrid)
    binning: BinningMode = BinningMode.SOFT
    metric: Literal["mi", "ncc"] = "mi"

    @field_validator("levels")
    @classmethod
    def validate_levels(cls, v: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
        if not v:
            msg = "levels must not be empty"
            raise ValueError(msg)
        factors = [f for f, _ in v]
        if any(f < 1 for f in factors) or any(it < 0 for _, it in v):
            msg = f"level factors must be >= 1 and iterations >= 0, got {v}"
            raise ValueError(msg)
        if any(a <= b for a, b in zip(factors, factors[1:], strict=False)):
            msg = f"level factors must be strictly descending, got {factors}"
            raise ValueError(msg)
        return v

    @model_validator(mode="after")
    def validate_steps(self) -> Self:
        if self.min_step > self.step_init:
            msg = f"min_step {self.min_step} must not exceed step_init {self.step_init}"
            raise ValueError(msg)
        return self


class RegistrationStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED = "diverged"


class LevelTrace(BaseModel):
    """Optimizer summary of one pyramid level."""

    factor: int
    iterations: int
    start_loss: float
    final_loss: float
    converged: bool


class RegistrationResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    transform: RigidTransform
    loss: float
    identity_loss: float
    status: RegistrationStatus
    levels: list[LevelTrace] = Field(default_factory=list)
