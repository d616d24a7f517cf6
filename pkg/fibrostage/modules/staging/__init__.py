from fibrostage.modules.staging.schemas import CalibrationSample, StageResult, StagingConfig, Thresholds
from fibrostage.modules.staging.service import (
    calibrate,
    default_thresholds,
    group_by_subject,
    map_y1,
    map_y4,
    read_staging_report,
    stage_predictions,
    stage_subject,
    stratified_folds,
    subject_score,
    threshold_grid,
    write_staging_report,
    youden_threshold,
)

__all__ = [
    "CalibrationSample",
    "StageResult",
    "StagingConfig",
    "Thresholds",
    "calibrate",
    "default_thresholds",
    "group_by_subject",
    "map_y1",
    "map_y4",
    "read_staging_report",
    "stage_predictions",
    "stage_subject",
    "stratified_folds",
    "subject_score",
    "threshold_grid",
    "write_staging_report",
    "youden_threshold",
]
