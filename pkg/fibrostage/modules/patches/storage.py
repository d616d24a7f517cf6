"""Binary patch dataset container.

Layout: magic line, little-endian u64 header length, JSON header, float32 patch tensors
(count x K x S x S), uint8 supports (count x S x S), u64 index length, JSON index with one
record per patch.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np

from fibrostage.core.errors import PatchExtractionError
from fibrostage.core.logger import get_logger
from fibrostage.modules.patches.constants import DATASET_MAGIC, DATASET_VERSION, ERROR_MESSAGES
from fibrostage.modules.patches.schemas import Patch

logger = get_logger("modules.patches.storage")

_U64 = np.dtype("<u8")
_F32 = np.dtype("<f4")


def _length_prefixed(payload: dict[str, Any] | list[Any]) -> bytes:
    raw = json.dumps(payload, allow_nan=False).encode("utf-8")
    return np.array([len(raw)], dtype=_U64).tobytes() + raw


def save_patch_dataset(
    patches: list[Patch],
    path: str | Path,
    channels: tuple[str, ...] | None = None,
    patch_size: int | None = None,
) -> None:
    """Write ``patches`` to ``path``; an empty dataset needs ``channels`` and ``patch_size``."""
    if patches:
        channels = patches[0].channels
        patch_size = patches[0].size
    elif channels is None or patch_size is None:
        raise PatchExtractionError(ERROR_MESSAGES["DATASET_EMPTY_WRITE"])

    header = {
        "version": DATASET_VERSION,
        "count": len(patches),
        "channels": list(channels),
        "patch_size": patch_size,
    }
    index = [
        {
            "subject_id": p.subject_id,
            "z": p.slice_index,
            "y": p.y,
            "x": p.x,
            "coverage": p.coverage,
            "label": p.label,
            "augmentation": p.augmentation,
        }
        for p in patches
    ]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as f:
        f.write(DATASET_MAGIC)
        f.write(_length_prefixed(header))
        for p in patches:
            f.write(np.asarray(p.data, dtype=_F32).tobytes())
        for p in patches:
            f.write(np.asarray(p.support, dtype=np.uint8).tobytes())
        f.write(_length_prefixed(index))
    logger.info("Wrote %d patches to %s", len(patches), path)


class _Reader:
    def __init__(self, raw: bytes) -> None:
        self.raw = raw
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.raw):
            msg = f"truncated at byte {self.pos} (need {n} more)"
            raise ValueError(msg)
        out = self.raw[self.pos : self.pos + n]
        self.pos += n
        return out

    def json_block(self) -> Any:
        (length,) = np.frombuffer(self.take(8), dtype=_U64)
        return json.loads(self.take(int(length)).decode("utf-8"))


def load_patch_dataset(path: str | Path) -> list[Patch]:
    """Read a dataset written by :func:`save_patch_dataset`.

    Raises:
        PatchExtractionError: If the file is missing, truncated or not a patch dataset.
    """
    path = Path(path)
    try:
        reader = _Reader(path.read_bytes())
        if reader.take(len(DATASET_MAGIC)) != DATASET_MAGIC:
            msg = "bad magic"
            raise ValueError(msg)
        header = reader.json_block()
        count = int(header["count"])
        channels = tuple(header["channels"])
        size = int(header["patch_size"])
        k = len(channels)
        tensors = np.frombuffer(reader.take(count * k * size * size * _F32.itemsize), dtype=_F32)
        supports = np.frombuffer(reader.take(count * size * size), dtype=np.uint8)
        index = reader.json_block()
        if len(index) != count:
            msg = f"index has {len(index)} records for {count} patches"
            raise ValueError(msg)
        tensors = tensors.reshape(count, k, size, size)
        supports = supports.reshape(count, size, size)
        return [
            Patch(
                subject_id=rec["subject_id"],
                slice_index=rec["z"],
                grid_xy=(rec["x"], rec["y"]),
                data=tensors[i],
                support=supports[i],
                coverage=rec["coverage"],
                channels=channels,
                label=rec["label"],
                augmentation=rec.get("augmentation"),
            )
            for i, rec in enumerate(index)
        ]
    except (OSError, ValueError, KeyError, TypeError) as e:
        msg = ERROR_MESSAGES["DATASET_UNREADABLE"].format(path=path, error=e)
        raise PatchExtractionError(msg) from e
