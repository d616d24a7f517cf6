"""Prediction CSV reading and writing (``subject_id,z,y,x,prob``)."""

import csv
from pathlib import Path

from pydantic import ValidationError

from fibrostage.core.errors import PredictionFormatError
from fibrostage.core.logger import get_logger
from fibrostage.modules.clf.constants import ERROR_MESSAGES, PREDICTION_HEADER
from fibrostage.modules.clf.schemas import PatchPrediction

logger = get_logger("modules.clf.predictions")


def _parse_row(row: list[str]) -> PatchPrediction:
    if len(row) != len(PREDICTION_HEADER):
        msg = ERROR_MESSAGES["COLUMNS"].format(expected=len(PREDICTION_HEADER), actual=len(row))
        raise ValueError(msg)
    subject_id, z, y, x, prob = (field.strip() for field in row)
    value = float(prob)
    if not 0.0 <= value <= 1.0:
        raise ValueError(ERROR_MESSAGES["PROB_RANGE"].format(prob=prob))
    return PatchPrediction(subject_id=subject_id, z=int(z), y=int(y), x=int(x), prob=value)


def load_external_predictions(path: str | Path) -> list[PatchPrediction]:
    """Read patch predictions produced by any classifier.

    The header line is optional; blank lines are ignored and an empty file yields no
    predictions. The binary call is always recomputed from ``prob``.

    Raises:
        PredictionFormatError: On a malformed row or a probability outside [0, 1].
    """
    path = Path(path)
    predictions: list[PatchPrediction] = []
    with path.open(encoding="utf-8", newline="") as f:
        for line, row in enumerate(csv.reader(f), start=1):
            if not row or all(not field.strip() for field in row):
                continue
            if line == 1 and tuple(field.strip() for field in row) == PREDICTION_HEADER:
                continue
            try:
                predictions.append(_parse_row(row))
            except (ValueError, ValidationError) as e:
                msg = ERROR_MESSAGES["ROW"].format(path=path, line=line, error=e)
                raise PredictionFormatError(msg) from e
    logger.info("Loaded %d predictions from %s", len(predictions), path)
    return predictions


def write_predictions(predictions: list[PatchPrediction], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(PREDICTION_HEADER)
        for p in predictions:
            writer.writerow([p.subject_id, p.z, p.y, p.x, repr(p.prob)])
