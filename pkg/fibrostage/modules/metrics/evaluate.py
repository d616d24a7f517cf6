"""Evaluation reports over subjects, modalities and cohort groups."""

from collections.abc import Mapping, Sequence
from pathlib import Path
from statistics import fmean

from fibrostage.common.utils import dump_json
from fibrostage.core.errors import MetricError
from fibrostage.core.logger import get_logger
from fibrostage.modules.imgcore.schemas import Mask
from fibrostage.modules.metrics.constants import ERROR_MESSAGES
from fibrostage.modules.metrics.schemas import (
    ClsScore,
    EvaluationReport,
    SegScore,
    SubjectClassification,
    SubjectSegmentation,
)
from fibrostage.modules.metrics.service import accuracy, auc, dice, hausdorff
from fibrostage.modules.staging.schemas import StageResult

logger = get_logger("modules.metrics.evaluate")


def score_segmentation(predicted: Mask, truth: Mask) -> SegScore:
    hd = None if predicted.is_empty or truth.is_empty else hausdorff(predicted, truth)
    return SegScore(dice=dice(predicted, truth), hd=hd)


def _mean_scores(scores: Sequence[SegScore]) -> SegScore:
    hds = [s.hd for s in scores if s.hd is not None]
    return SegScore(dice=fmean(s.dice for s in scores), hd=fmean(hds) if hds else None)


def evaluate_segmentation(cases: Sequence[tuple[str, str, Mask, Mask]]) -> EvaluationReport:
    """Dice and HD per (subject, modality, predicted mask, reference mask), with means."""
    per_subject = [
        SubjectSegmentation(subject_id=subject, modality=modality, score=score_segmentation(pred, ref))
        for subject, modality, pred, ref in cases
    ]
    if not per_subject:
        return EvaluationReport()
    overall = _mean_scores([entry.score for entry in per_subject])
    modalities = sorted({entry.modality for entry in per_subject})
    per_modality = {
        m: _mean_scores([entry.score for entry in per_subject if entry.modality == m]) for m in modalities
    }
    return EvaluationReport(
        per_subject=per_subject,
        mean_dice=overall.dice,
        mean_hd=overall.hd,
        per_modality=per_modality,
    )


def _task_score(scores: list[float], truth: list[bool], decisions: list[bool], task: str) -> ClsScore:
    try:
        value: float | None = auc(scores, truth)
    except MetricError as e:
        logger.warning("AUC for %s undefined: %s", task, e)
        value = None
    return ClsScore(auc=value, acc=accuracy(decisions, truth), n=len(truth))


def _task_scores(entries: Sequence[SubjectClassification]) -> dict[str, ClsScore]:
    # task 1: Stage 4 positive, scored by y4; task 2: Stage 2-4 positive, scored by 1 - y1
    return {
        "task1": _task_score(
            [e.y4 for e in entries],
            [e.stage == 4 for e in entries],
            [e.task1_positive for e in entries],
            "task1",
        ),
        "task2": _task_score(
            [1.0 - e.y1 for e in entries],
            [e.stage >= 2 for e in entries],
            [e.task2_positive for e in entries],
            "task2",
        ),
    }


def evaluate_classification(
    results: Sequence[StageResult],
    stages: Mapping[str, int | None],
    groups: Mapping[str, str | None] | None = None,
) -> EvaluationReport:
    """AUC and accuracy of both staging tasks over subjects with a known stage.

    Subjects without a stage are left out. When subjects carry groups, every group also
    gets its own task scores.

    Raises:
        MetricError: If no result has a known stage.
    """
    groups = groups or {}
    entries = [
        SubjectClassification(
            subject_id=r.subject_id,
            stage=stage,
            group=groups.get(r.subject_id),
            s=r.s,
            y1=r.y1,
            y4=r.y4,
            task1_positive=r.task1_positive,
            task2_positive=r.task2_positive,
        )
        for r in results
        if (stage := stages.get(r.subject_id)) is not None
    ]
    if not entries:
        raise MetricError(ERROR_MESSAGES["NO_LABELS"])

    tasks = _task_scores(entries)
    by_group: dict[str, dict[str, ClsScore]] = {}
    for name in sorted({e.group for e in entries if e.group is not None}):
        by_group[name] = _task_scores([e for e in entries if e.group == name])

    return EvaluationReport(
        per_subject=list(entries),
        auc_task1=tasks["task1"].auc,
        acc_task1=tasks["task1"].acc,
        auc_task2=tasks["task2"].auc,
        acc_task2=tasks["task2"].acc,
        groups=by_group,
    )


def write_report(report: EvaluationReport, path: str | Path) -> None:
    dump_json(report.model_dump(mode="json"), path)
