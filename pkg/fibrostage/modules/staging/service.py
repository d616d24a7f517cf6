"""Subject scoring, fibrosis probability mapping, calibration and staging."""

import csv
from collections.abc import Callable, Iterable, Sequence
from pathlib import Path

from fibrostage.core.errors import CalibrationError, StagingError
from fibrostage.core.logger import get_logger
from fibrostage.modules.clf.schemas import PatchPrediction
from fibrostage.modules.imgcore.schemas import ContrastMode
from fibrostage.modules.staging.constants import DEFAULT_THRESHOLDS, ERROR_MESSAGES, GRID_DIGITS, REPORT_HEADER
from fibrostage.modules.staging.schemas import CalibrationSample, StageResult, Thresholds

logger = get_logger("modules.staging.service")


def _check_score(s: float) -> None:
    if not 0.0 <= s <= 1.0:
        raise StagingError(ERROR_MESSAGES["SCORE_DOMAIN"].format(s=s))


def _check_tau(tau: float) -> None:
    if not 0.0 < tau < 1.0:
        raise StagingError(ERROR_MESSAGES["TAU_DOMAIN"].format(tau=tau))


def subject_score(preds: Sequence[PatchPrediction]) -> float:
    """Fraction of a subject's patches called Stage-4-like.

    Raises:
        StagingError: On an empty list or predictions from several subjects.
    """
    if not preds:
        raise StagingError(ERROR_MESSAGES["EMPTY"])
    subjects = sorted({p.subject_id for p in preds})
    if len(subjects) > 1:
        raise StagingError(ERROR_MESSAGES["MIXED"].format(subjects=subjects))
    return sum(1 for p in preds if p.positive) / len(preds)


def map_y1(s: float, tau1: float) -> float:
    """Probability of Stage 1, falling linearly to 0.5 at ``tau1`` and to 0 at ``s = 1``."""
    _check_score(s)
    _check_tau(tau1)
    if s <= tau1:
        return 1.0 - 0.5 * (s / tau1)
    return 0.5 - 0.5 * ((s - tau1) / (1.0 - tau1))


def map_y4(s: float, tau2: float) -> float:
    """Probability of Stage 4, rising linearly to 0.5 at ``tau2`` and to 1 at ``s = 1``."""
    _check_score(s)
    _check_tau(tau2)
    if s <= tau2:
        return 0.5 * (s / tau2)
    return 0.5 + 0.5 * ((s - tau2) / (1.0 - tau2))


def default_thresholds(mode: ContrastMode) -> Thresholds:
    tau1, tau2 = DEFAULT_THRESHOLDS[mode.value]
    return Thresholds(tau1=tau1, tau2=tau2, mode=mode)


def stage_subject(preds: Sequence[PatchPrediction], thresholds: Thresholds) -> StageResult:
    """Score, probabilities and both binary decisions for one subject.

    A decision is positive only when ``s`` is strictly above its threshold.
    """
    s = subject_score(preds)
    return StageResult(
        subject_id=preds[0].subject_id,
        n_patches=len(preds),
        s=s,
        y1=map_y1(s, thresholds.tau1),
        y4=map_y4(s, thresholds.tau2),
        task1_positive=s > thresholds.tau2,
        task2_positive=s > thresholds.tau1,
    )


def group_by_subject(preds: Iterable[PatchPrediction]) -> dict[str, list[PatchPrediction]]:
    """Predictions per subject, subjects in sorted order."""
    groups: dict[str, list[PatchPrediction]] = {}
    for p in preds:
        groups.setdefault(p.subject_id, []).append(p)
    return {subject: groups[subject] for subject in sorted(groups)}


def stage_predictions(preds: Iterable[PatchPrediction], thresholds: Thresholds) -> list[StageResult]:
    return [stage_subject(group, thresholds) for group in group_by_subject(preds).values()]


def threshold_grid(grid_step: float) -> list[float]:
    """``grid_step, 2 * grid_step, ...`` strictly below 1, each rounded to 10 decimals."""
    count = int(round(1.0 / grid_step))
    points = (round(k * grid_step, GRID_DIGITS) for k in range(1, count + 1))
    return [tau for tau in points if tau < 1.0]


def youden_threshold(scores: Sequence[float], positive: Sequence[bool], grid: Sequence[float]) -> float:
    """Grid threshold maximizing sensitivity + specificity - 1 for the rule ``s > tau``.

    Ties go to the smallest threshold. Both classes must be present.
    """
    n_pos = sum(positive)
    n_neg = len(positive) - n_pos
    best_tau = grid[0]
    best_j = float("-inf")
    for tau in grid:
        tp = sum(1 for s, p in zip(scores, positive, strict=True) if p and s > tau)
        tn = sum(1 for s, p in zip(scores, positive, strict=True) if not p and s <= tau)
        j = tp / n_pos + tn / n_neg - 1.0
        if j > best_j:
            best_tau, best_j = tau, j
    return best_tau


def stratified_folds(samples: Sequence[CalibrationSample], folds: int) -> list[int]:
    """Fold index of every sample: the j-th sample of each stage goes to fold ``j % folds``."""
    seen: dict[int, int] = {}
    assignment: list[int] = []
    for sample in samples:
        j = seen.get(sample.stage, 0)
        assignment.append(j % folds)
        seen[sample.stage] = j + 1
    return assignment


def _task_threshold(
    name: str,
    samples: Sequence[CalibrationSample],
    assignment: list[int],
    folds: int,
    grid: list[float],
    is_positive: Callable[[int], bool],
) -> float | None:
    taus: list[float] = []
    for fold in range(folds):
        train = [s for s, f in zip(samples, assignment, strict=True) if f != fold]
        labels = [is_positive(s.stage) for s in train]
        if all(labels) or not any(labels):
            logger.warning("Fold %d skipped for %s: training part lacks a class", fold, name)
            continue
        taus.append(youden_threshold([s.s for s in train], labels, grid))
    if not taus:
        return None
    return sum(taus) / len(taus)


def calibrate(
    samples: Sequence[CalibrationSample],
    folds: int,
    grid_step: float,
    mode: ContrastMode = ContrastMode.NONCONTRAST,
) -> Thresholds:
    """Choose (tau1, tau2) by Youden's J with stratified k-fold averaging.

    In every fold the thresholds are picked on the samples outside that fold; the result is
    the mean over folds. Folds whose training part lacks a class are skipped. A task with no
    usable fold keeps the mode's default threshold.

    Raises:
        CalibrationError: On no samples, fewer than 2 folds or an invalid grid step.
    """
    if not samples:
        raise CalibrationError(ERROR_MESSAGES["NO_SAMPLES"])
    if folds < 2:
        raise CalibrationError(ERROR_MESSAGES["FOLDS"].format(folds=folds))
    if not 0.0 < grid_step <= 0.5:
        raise CalibrationError(ERROR_MESSAGES["GRID_STEP"].format(step=grid_step))

    grid = threshold_grid(grid_step)
    assignment = stratified_folds(samples, folds)
    defaults = default_thresholds(mode)

    tau1 = _task_threshold("tau1 (Stage 1 vs 2-4)", samples, assignment, folds, grid, lambda st: st >= 2)
    tau2 = _task_threshold("tau2 (Stage 4 vs 1-3)", samples, assignment, folds, grid, lambda st: st == 4)
    if tau1 is None:
        logger.warning("No usable fold for tau1, using default %.2f", defaults.tau1)
        tau1 = defaults.tau1
    if tau2 is None:
        logger.warning("No usable fold for tau2, using default %.2f", defaults.tau2)
        tau2 = defaults.tau2
    logger.info("Calibrated thresholds tau1=%.4f tau2=%.4f (%d samples, %d folds)", tau1, tau2, len(samples), folds)
    return Thresholds(tau1=tau1, tau2=tau2, mode=mode)


def write_staging_report(results: Sequence[StageResult], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        for r in results:
            writer.writerow(
                [r.subject_id, r.n_patches, repr(r.s), repr(r.y1), repr(r.y4), int(r.task1_positive), int(r.task2_positive)]
            )


def read_staging_report(path: str | Path) -> list[StageResult]:
    """Parse a report written by :func:`write_staging_report`."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
        return [
            StageResult(
                subject_id=row["subject_id"],
                n_patches=int(row["n_patches"]),
                s=float(row["s"]),
                y1=float(row["y1"]),
                y4=float(row["y4"]),
                task1_positive=row["task1"] == "1",
                task2_positive=row["task2"] == "1",
            )
            for row in rows
        ]
    except (OSError, KeyError, ValueError) as e:
        msg = f"Cannot read staging report {path}: {e}"
        raise StagingError(msg) from e
