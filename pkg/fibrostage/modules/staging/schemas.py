"""Thresholds, staging results and calibration samples."""

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from fibrostage.core.errors import StagingError
from fibrostage.modules.imgcore.schemas import ContrastMode
from fibrostage.modules.staging.constants import DEFAULT_FOLDS, DEFAULT_GRID_STEP, ERROR_MESSAGES


class Thresholds(BaseModel):
    """Operating points on the subject score: ``tau1`` for Stage 1 vs 2-4, ``tau2`` for Stage 4 vs 1-3."""

    model_config = ConfigDict(frozen=True)

    tau1: float = Field(..., gt=0.0, lt=1.0)
    tau2: float = Field(..., gt=0.0, lt=1.0)
    mode: ContrastMode = ContrastMode.NONCONTRAST

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Thresholds":
        try:
            return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValidationError) as e:
            msg = ERROR_MESSAGES["THRESHOLDS_UNREADABLE"].format(path=path, error=e)
            raise StagingError(msg) from e


class StageResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    subject_id: str
    n_patches: int = Field(..., ge=1)
    s: float = Field(..., ge=0.0, le=1.0)
    y1: float = Field(..., ge=0.0, le=1.0)
    y4: float = Field(..., ge=0.0, le=1.0)
    task1_positive: bool = Field(..., description="Cirrhosis: Stage 4 vs Stage 1-3")
    task2_positive: bool = Field(..., description="Substantial fibrosis: Stage 2-4 vs Stage 1")


class CalibrationSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    subject_id: str = ""
    s: float = Field(..., ge=0.0, le=1.0)
    stage: int = Field(..., ge=1, le=4)


class StagingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    folds: int = Field(default=DEFAULT_FOLDS, ge=2)
    grid_step: float = Field(default=DEFAULT_GRID_STEP, gt=0.0, le=0.5)
    tau1: float | None = Field(default=None, gt=0.0, lt=1.0, description="Fixed tau1, skips calibration")
    tau2: float | None = Field(default=None, gt=0.0, lt=1.0, description="Fixed tau2, skips calibration")
