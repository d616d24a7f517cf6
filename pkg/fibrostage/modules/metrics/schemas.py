from pydantic import BaseModel, ConfigDict, Field


class SegScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    dice: float = Field(..., ge=0.0, le=1.0)
    hd: float | None = Field(default=None, ge=0.0, description="Hausdorff distance in mm; None if a mask is empty")


class ClsScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    auc: float | None = Field(default=None, ge=0.0, le=1.0, description="None when only one class is present")
    acc: float = Field(..., ge=0.0, le=1.0)
    n: int = Field(..., ge=1)


class SubjectSegmentation(BaseModel):
    subject_id: str
    modality: str
    score: SegScore


class SubjectClassification(BaseModel):
    subject_id: str
    stage: int
    group: str | None = None
    s: float
    y1: float
    y4: float
    task1_positive: bool
    task2_positive: bool


class EvaluationReport(BaseModel):
    """Summary written by the evaluation commands."""

    per_subject: list[SubjectClassification | SubjectSegmentation] = Field(default_factory=list)
    mean_dice: float | None = None
    mean_hd: float | None = None
    auc_task1: float | None = None
    acc_task1: float | None = None
    auc_task2: float | None = None
    acc_task2: float | None = None
    per_modality: dict[str, SegScore] = Field(default_factory=dict)
    groups: dict[str, dict[str, ClsScore]] = Field(default_factory=dict)
