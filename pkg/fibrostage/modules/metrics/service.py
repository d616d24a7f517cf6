"""Segmentation overlap, surface distance and classification metrics."""

from collections.abc import Sequence

import numpy as np
from scipy import ndimage
from scipy.stats import rankdata

from fibrostage.core.errors import MetricError
from fibrostage.modules.imgcore.schemas import Mask
from fibrostage.modules.metrics.constants import ERROR_MESSAGES

# 6-connectivity: a boundary voxel has a face neighbour outside the mask
_FACE_STRUCTURE = ndimage.generate_binary_structure(3, 1)


def _check_pair(a: Mask, b: Mask) -> None:
    if not a.geometry.matches(b.geometry):
        raise MetricError(ERROR_MESSAGES["GEOMETRY"].format(a=a.geometry, b=b.geometry))


def dice(a: Mask, b: Mask) -> float:
    """``2 |A & B| / (|A| + |B|)``; two empty masks agree perfectly (1.0)."""
    _check_pair(a, b)
    total = a.count + b.count
    if total == 0:
        return 1.0
    overlap = int(np.count_nonzero(a.voxels & b.voxels))
    return 2.0 * overlap / total


def boundary(mask: Mask) -> np.ndarray:
    """Mask voxels with at least one face neighbour outside the mask (or outside the grid)."""
    voxels = mask.voxels
    return voxels & ~ndimage.binary_erosion(voxels, structure=_FACE_STRUCTURE, border_value=0)


def _directed(src: np.ndarray, dst: np.ndarray, spacing: tuple[float, float, float]) -> float:
    # distance of every voxel to the nearest dst voxel, read at src voxels
    distance = ndimage.distance_transform_edt(~dst, sampling=spacing)
    return float(np.max(distance[src]))


def hausdorff(a: Mask, b: Mask) -> float:
    """Symmetric Hausdorff distance (mm) between the boundary voxel centres of two masks.

    Raises:
        MetricError: If either mask is empty or the grids differ.
    """
    _check_pair(a, b)
    if a.is_empty or b.is_empty:
        raise MetricError(ERROR_MESSAGES["EMPTY_MASK"])
    ba = boundary(a)
    bb = boundary(b)
    return max(_directed(ba, bb, a.spacing), _directed(bb, ba, a.spacing))


def auc(scores: Sequence[float], positive: Sequence[bool]) -> float:
    """Mann-Whitney AUC: share of positive/negative pairs ranked correctly, ties counting half.

    Raises:
        MetricError: If only one class is present or the lengths differ.
    """
    if len(scores) != len(positive):
        raise MetricError(ERROR_MESSAGES["LENGTH"].format(n_scores=len(scores), n_labels=len(positive)))
    labels = np.asarray(positive, dtype=bool)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise MetricError(ERROR_MESSAGES["SINGLE_CLASS"].format(n_pos=n_pos, n_neg=n_neg))
    ranks = rankdata(np.asarray(scores, dtype=np.float64))
    u = float(ranks[labels].sum()) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def accuracy(predicted: Sequence[bool], truth: Sequence[bool]) -> float:
    """Fraction of decisions equal to the truth.

    Raises:
        MetricError: On empty input or a length mismatch.
    """
    if len(predicted) != len(truth):
        raise MetricError(ERROR_MESSAGES["LENGTH"].format(n_scores=len(predicted), n_labels=len(truth)))
    if not predicted:
        raise MetricError(ERROR_MESSAGES["NO_DECISIONS"])
    correct = sum(1 for p, t in zip(predicted, truth, strict=True) if bool(p) == bool(t))
    return correct / len(predicted)
