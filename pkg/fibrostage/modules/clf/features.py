"""Handcrafted patch features for the baseline classifier."""

import numpy as np
from scipy import ndimage

from fibrostage.modules.clf.constants import FEATURES_PER_CHANNEL, HISTOGRAM_BINS, HISTOGRAM_RANGE
from fibrostage.modules.clf.schemas import PatchFeatures
from fibrostage.modules.patches.schemas import Patch

_HIST_EDGES = np.linspace(HISTOGRAM_RANGE[0], HISTOGRAM_RANGE[1], HISTOGRAM_BINS + 1)


def feature_names(channels: tuple[str, ...]) -> tuple[str, ...]:
    names: list[str] = []
    for ch in channels:
        names += [f"{ch}_mean", f"{ch}_std", f"{ch}_median"]
        names += [f"{ch}_hist{i}" for i in range(HISTOGRAM_BINS)]
        names += [f"{ch}_grad_mean", f"{ch}_grad_std"]
    names.append("coverage")
    return tuple(names)


def _histogram(values: np.ndarray) -> np.ndarray:
    # out-of-range values count in the edge bins
    idx = np.clip(np.searchsorted(_HIST_EDGES, values, side="right") - 1, 0, HISTOGRAM_BINS - 1)
    return np.bincount(idx, minlength=HISTOGRAM_BINS).astype(np.float64) / values.size


def _channel_features(channel: np.ndarray, inside: np.ndarray, interior: np.ndarray) -> np.ndarray:
    out = np.zeros(FEATURES_PER_CHANNEL, dtype=np.float64)
    if not inside.any() or not channel.any():
        return out
    values = channel[inside]
    out[0] = values.mean()
    out[1] = values.std()
    out[2] = np.median(values)
    out[3 : 3 + HISTOGRAM_BINS] = _histogram(values)

    gy, gx = np.gradient(channel)
    magnitude = np.hypot(gx, gy)[interior]
    out[-2] = magnitude.mean()
    out[-1] = magnitude.std()
    return out


def featurize(patch: Patch) -> PatchFeatures:
    """13 features per channel plus the patch coverage.

    Intensity statistics are taken over the in-mask pixels. Gradient statistics use the
    mask eroded by one pixel, so the zeroed background does not create false edges; the
    window border itself is not eroded. All-zero channels give all-zero features.
    """
    inside = patch.support.astype(bool)
    interior = ndimage.binary_erosion(inside, border_value=1)
    if not interior.any():
        interior = inside
    data = patch.data.astype(np.float64)
    blocks = [_channel_features(data[k], inside, interior) for k in range(patch.n_channels)]
    values = np.concatenate([*blocks, np.array([patch.coverage])])
    return PatchFeatures(values=values, names=feature_names(patch.channels))


def feature_matrix(patches: list[Patch]) -> np.ndarray:
    """Stacked feature vectors, one row per patch."""
    if not patches:
        return np.zeros((0, 0), dtype=np.float64)
    return np.vstack([featurize(p).values for p in patches])
