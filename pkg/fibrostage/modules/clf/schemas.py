"""Classifier models, training settings and patch predictions."""

from pathlib import Path
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from fibrostage.core.errors import ClassifierError
from fibrostage.modules.clf.constants import (
    DECISION_THRESHOLD,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_SEED,
    DEFAULT_WEIGHT_DECAY,
    ERROR_MESSAGES,
)


class TrainingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(default=DEFAULT_EPOCHS, ge=1)
    lr: float = Field(default=DEFAULT_LEARNING_RATE, gt=0)
    weight_decay: float = Field(default=DEFAULT_WEIGHT_DECAY, ge=0)
    seed: int = DEFAULT_SEED


class PatchFeatures(BaseModel):
    """Handcrafted feature vector of one patch."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    names: tuple[str, ...]

    @model_validator(mode="after")
    def validate_values(self) -> Self:
        if self.values.shape != (len(self.names),):
            msg = f"{self.values.shape} feature values for {len(self.names)} names"
            raise ValueError(msg)
        if not np.all(np.isfinite(self.values)):
            msg = "features must be finite"
            raise ValueError(msg)
        return self


class LogRegModel(BaseModel):
    """Logistic regression over standardized features."""

    model_config = ConfigDict(frozen=True)

    weights: list[float]
    bias: float
    feature_mean: list[float]
    feature_std: list[float]
    channels: tuple[str, ...] = ()
    final_loss: float | None = None
    training: TrainingConfig = Field(default_factory=TrainingConfig)

    @field_validator("feature_std")
    @classmethod
    def validate_std(cls, v: list[float]) -> list[float]:
        if any(s <= 0 for s in v):
            msg = "feature_std entries must be positive"
            raise ValueError(msg)
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> Self:
        n = len(self.weights)
        if len(self.feature_mean) != n or len(self.feature_std) != n:
            msg = f"inconsistent dimensions: {n} weights, {len(self.feature_mean)} means, {len(self.feature_std)} stds"
            raise ValueError(msg)
        return self

    @property
    def n_features(self) -> int:
        return len(self.weights)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "LogRegModel":
        try:
            return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValidationError) as e:
            msg = ERROR_MESSAGES["MODEL_UNREADABLE"].format(path=path, error=e)
            raise ClassifierError(msg) from e


class PatchPrediction(BaseModel):
    """Probability that a patch is Stage-4-like; the binary call is derived from it."""

    model_config = ConfigDict(frozen=True)

    subject_id: str = Field(..., min_length=1)
    z: int = Field(..., ge=0)
    y: int = Field(..., ge=0)
    x: int = Field(..., ge=0)
    prob: float = Field(..., ge=0.0, le=1.0, allow_inf_nan=False)

    @property
    def positive(self) -> bool:
        """Binary patch call; a probability of exactly 0.5 counts as positive."""
        return self.prob >= DECISION_THRESHOLD
