from fibrostage.modules.metrics.evaluate import (
    evaluate_classification,
    evaluate_segmentation,
    score_segmentation,
    write_report,
)
from fibrostage.modules.metrics.schemas import ClsScore, EvaluationReport, SegScore
from fibrostage.modules.metrics.service import accuracy, auc, boundary, dice, hausdorff

__all__ = [
    "ClsScore",
    "EvaluationReport",
    "SegScore",
    "accuracy",
    "auc",
    "boundary",
    "dice",
    "evaluate_classification",
    "evaluate_segmentation",
    "hausdorff",
    "score_segmentation",
    "write_report",
]
