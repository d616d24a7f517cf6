"""Subject manifest: a JSON array of study records referencing NIfTI files."""

import json
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from fibrostage.common.utils import dump_json, load_json
from fibrostage.core.errors import ImageIOError, ManifestError
from fibrostage.core.logger import get_logger
from fibrostage.modules.imgcore.constants import ERROR_MESSAGES, REFERENCE_MODALITY
from fibrostage.modules.imgcore.io import load_mask, load_volume
from fibrostage.modules.imgcore.schemas import ContrastMode, Study

logger = get_logger("modules.imgcore.manifest")


class ManifestRecord(BaseModel):
    """One manifest entry. Paths are relative to the manifest's directory unless absolute."""

    model_config = ConfigDict(extra="forbid")

    subject_id: str = Field(..., min_length=1)
    stage: int | None = Field(default=None, ge=1, le=4)
    mask: str | None = None
    modalities: dict[str, str] = Field(default_factory=dict)
    group: str | None = None


def _resolve(base: Path, ref: str) -> Path:
    path = Path(ref)
    return path if path.is_absolute() else base / path


def read_manifest_records(path: str | Path) -> list[ManifestRecord]:
    """Parse and validate manifest records without touching the referenced images."""
    path = Path(path)
    try:
        raw: Any = load_json(path)
    except (OSError, json.JSONDecodeError) as e:
        msg = ERROR_MESSAGES["MANIFEST_UNREADABLE"].format(path=path, error=e)
        raise ManifestError(msg) from e
    if not isinstance(raw, list):
        msg = ERROR_MESSAGES["MANIFEST_UNREADABLE"].format(path=path, error="top level must be a JSON array")
        raise ManifestError(msg)

    records: list[ManifestRecord] = []
    for index, item in enumerate(raw):
        subject = item.get("subject_id", "?") if isinstance(item, dict) else "?"
        try:
            record = ManifestRecord.model_validate(item)
        except ValidationError as e:
            msg = ERROR_MESSAGES["MANIFEST_RECORD"].format(index=index, subject=subject, error=e)
            raise ManifestError(msg) from e
        if REFERENCE_MODALITY not in record.modalities:
            msg = ERROR_MESSAGES["MISSING_REFERENCE"].format(subject=record.subject_id)
            raise ManifestError(msg)
        records.append(record)
    return records


def load_study(record: ManifestRecord, base_dir: str | Path, mode: ContrastMode) -> Study:
    """Load every file referenced by ``record`` into a Study."""
    base = Path(base_dir)
    try:
        modalities = {name: load_volume(_resolve(base, ref)) for name, ref in record.modalities.items()}
        mask = load_mask(_resolve(base, record.mask)) if record.mask else None
    except ImageIOError as e:
        msg = ERROR_MESSAGES["MANIFEST_RECORD"].format(index="-", subject=record.subject_id, error=e)
        raise ManifestError(msg) from e

    try:
        return Study(
            subject_id=record.subject_id,
            modalities=modalities,
            mask=mask,
            stage=record.stage,
            contrast_mode=mode,
            group=record.group,
        )
    except ValidationError as e:
        msg = ERROR_MESSAGES["MANIFEST_RECORD"].format(index="-", subject=record.subject_id, error=e)
        raise ManifestError(msg) from e


def load_manifest(path: str | Path, mode: ContrastMode = ContrastMode.NONCONTRAST) -> list[Study]:
    """Load all studies listed in a manifest.

    Missing modalities are simply absent keys; missing masks and stages are allowed.

    Raises:
        ManifestError: missing GED4, stage outside 1..4, unknown fields, unreadable files
    """
    path = Path(path)
    records = read_manifest_records(path)
    studies = [load_study(record, path.parent, mode) for record in records]
    logger.info("Loaded %d studies from %s (%s mode)", len(studies), path, mode.value)
    return studies


def write_manifest(records: list[ManifestRecord], path: str | Path) -> None:
    """Write records as a manifest, omitting unset optional fields."""
    dump_json([record.model_dump(exclude_none=True) for record in records], path)
