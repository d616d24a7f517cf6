"""Patch prediction overlays on a GED4 slice (red: Stage-4-like, blue: Stage-1-like)."""

from collections.abc import Sequence
from pathlib import Path

import numpy as np
from PIL import Image

from fibrostage.modules.clf.schemas import PatchPrediction
from fibrostage.modules.imgcore.schemas import Volume

OVERLAY_ALPHA = 0.35
WINDOW_PERCENTILES = (1.0, 99.0)
POSITIVE_COLOR = (255.0, 0.0, 0.0)
NEGATIVE_COLOR = (0.0, 0.0, 255.0)


def window_slice(volume: Volume, slice_index: int) -> np.ndarray:
    """Axial slice as ``[y, x]`` grey levels in [0, 255], windowed to the 1st-99th percentile.

    Raises:
        ValueError: If the slice is outside the volume.
    """
    depth = volume.dims[2]
    if not 0 <= slice_index < depth:
        msg = f"slice {slice_index} outside 0..{depth - 1}"
        raise ValueError(msg)
    plane = volume.data[:, :, slice_index].T.astype(np.float64)
    lo, hi = np.percentile(plane, WINDOW_PERCENTILES)
    if hi <= lo:
        return np.zeros_like(plane)
    return np.clip((plane - lo) / (hi - lo), 0.0, 1.0) * 255.0


def render_overlay(
    volume: Volume,
    predictions: Sequence[PatchPrediction],
    slice_index: int,
    patch_size: int,
) -> Image.Image:
    """Blend one rectangle per prediction on the slice; overlapping colours are averaged."""
    grey = window_slice(volume, slice_index)
    colour_sum = np.zeros((*grey.shape, 3), dtype=np.float64)
    counts = np.zeros(grey.shape, dtype=np.float64)
    for p in predictions:
        if p.z != slice_index:
            continue
        colour = POSITIVE_COLOR if p.positive else NEGATIVE_COLOR
        window = (slice(p.y, p.y + patch_size), slice(p.x, p.x + patch_size))
        colour_sum[window] += colour
        counts[window] += 1.0

    rgb = np.repeat(grey[:, :, None], 3, axis=2)
    covered = counts > 0
    mean_colour = colour_sum[covered] / counts[covered][:, None]
    rgb[covered] = (1.0 - OVERLAY_ALPHA) * rgb[covered] + OVERLAY_ALPHA * mean_colour
    return Image.fromarray(np.rint(rgb).astype(np.uint8))


def save_overlay(image: Image.Image, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    image.save(path, format="PNG")
