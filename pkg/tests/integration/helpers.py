"""Helpers for the end-to-end tests."""

import json
from collections.abc import Callable
from pathlib import Path

Runner = Callable[..., int]

RUN_CONFIG = {
    "logging": {"level": "warning"},
    "histogram": {"bins": 16},
    "registration": {
        "levels": [[2, 15], [1, 10]],
        "grid": {"patch_size": [8, 8, 4], "stride": [4, 4, 2]},
    },
    "classifier": {"epochs": 300},
}

PHANTOM_BASE = {
    "dims": [48, 48, 12],
    "spacing": [1.5, 1.5, 3.0],
    "organ": {"semi_axes": [30.0, 27.0, 15.0]},
    "seed": 11,
}


def write_json(path: Path, data: object) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def write_predictions(path: Path, rows: list[str]) -> Path:
    path.write_text("\n".join(["subject_id,z,y,x,prob", *rows]) + "\n", encoding="utf-8")
    return path
