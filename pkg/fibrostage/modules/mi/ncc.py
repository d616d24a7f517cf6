"""Patch-local normalized cross-correlation, an alternative similarity for registration."""

import math

import numpy as np

from fibrostage.core.errors import HistogramError
from fibrostage.modules.mi.constants import ERROR_MESSAGES
from fibrostage.modules.mi.schemas import PatchGrid
from fibrostage.modules.mi.service import patch_slices

_TINY = 1e-12


def local_ncc(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation of two patches; 0 when either one is constant."""
    xs = np.ravel(np.asarray(x, dtype=np.float64))
    ys = np.ravel(np.asarray(y, dtype=np.float64))
    if xs.size != ys.size:
        msg = ERROR_MESSAGES["LENGTH_MISMATCH"].format(nx=xs.size, ny=ys.size)
        raise HistogramError(msg)
    if xs.size == 0:
        raise HistogramError(ERROR_MESSAGES["EMPTY"])
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom < _TINY:
        return 0.0
    return float(dx @ dy) / denom


class PatchwiseNCC:
    """Mean local NCC loss, ``1 - mean NCC``, with the PatchwiseMI evaluation interface."""

    def __init__(self, fixed: np.ndarray, grid: PatchGrid) -> None:
        self.fixed = np.asarray(fixed, dtype=np.float64)
        self.patches = patch_slices(self.fixed.shape, grid)
        if not self.patches:
            count = None if grid.restriction_mask is None else grid.restriction_mask.count
            msg = ERROR_MESSAGES["NO_PATCHES"].format(
                dims=self.fixed.shape, patch=grid.patch_size, stride=grid.stride, mask=count
            )
            raise HistogramError(msg)

    @property
    def n_patches(self) -> int:
        return len(self.patches)

    def loss(self, moving: np.ndarray) -> float:
        arr = np.asarray(moving, dtype=np.float64)
        if arr.shape != self.fixed.shape:
            msg = ERROR_MESSAGES["DIMS_MISMATCH"].format(fixed=self.fixed.shape, moving=arr.shape)
            raise HistogramError(msg)
        values = [local_ncc(self.fixed[sl], arr[sl]) for sl in self.patches]
        return 1.0 - math.fsum(values) / len(values)
