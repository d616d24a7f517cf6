"""Patch-local mutual information loss and its gradient."""

import math

import numpy as np

from fibrostage.core.errors import HistogramError
from fibrostage.core.logger import get_logger
from fibrostage.modules.imgcore.schemas import Mask, Volume
from fibrostage.modules.mi.constants import ERROR_MESSAGES, FIXED_WEIGHT_CACHE_BYTES
from fibrostage.modules.mi.histogram import (
    bin_coordinates,
    data_range,
    hard_bin_indices,
    hard_joint_histogram,
    soft_bin_weights,
    soft_joint_histogram,
)
from fibrostage.modules.mi.schemas import BinningMode, HistogramConfig, JointHistogram, PatchGrid, Range

logger = get_logger("modules.mi.service")

PatchSlice = tuple[slice, slice, slice]


def local_mi(histogram: JointHistogram, cfg: HistogramConfig) -> float:
    """Mutual information of a joint histogram in nats.

    Zero-probability cells are skipped; the other cells contribute
    ``p * log((p + eps) / (px * py + eps))``.
    """
    joint = histogram.joint
    outer = np.outer(histogram.marginal_x, histogram.marginal_y)
    nz = joint > 0
    p = joint[nz]
    terms = p * np.log((p + cfg.epsilon) / (outer[nz] + cfg.epsilon))
    return math.fsum(terms.tolist())


def patch_slices(dims: tuple[int, int, int], grid: PatchGrid) -> list[PatchSlice]:
    """Patches of ``grid`` inside a volume of ``dims``, z outermost and x innermost.

    Raises:
        HistogramError: If the restriction mask does not match ``dims``.
    """
    mask = grid.restriction_mask
    if mask is not None and mask.dims != tuple(dims):
        msg = ERROR_MESSAGES["MASK_DIMS"].format(mask=mask.dims, dims=dims)
        raise HistogramError(msg)

    starts = [
        range(0, d - p + 1, s) if d >= p else range(0)
        for d, p, s in zip(dims, grid.patch_size, grid.stride, strict=True)
    ]
    px, py, pz = grid.patch_size
    out: list[PatchSlice] = []
    for z0 in starts[2]:
        for y0 in starts[1]:
            for x0 in starts[0]:
                if mask is not None and not mask.data[x0 + px // 2, y0 + py // 2, z0 + pz // 2]:
                    continue
                out.append((slice(x0, x0 + px), slice(y0, y0 + py), slice(z0, z0 + pz)))
    return out


def robust_range(values: np.ndarray, percentiles: Range, mask: Mask | None = None) -> Range:
    """Percentile intensity range over ``mask`` (or the whole array)."""
    data = np.asarray(values, dtype=np.float64)
    if mask is not None and not mask.is_empty:
        data = data[mask.data.astype(bool)]
    lo, hi = (float(v) for v in np.percentile(data, percentiles))
    if hi <= lo:
        return data_range(np.array([lo]))
    return lo, hi


def resolve_intensity_ranges(
    cfg: HistogramConfig,
    fixed: np.ndarray,
    moving: np.ndarray,
    mask: Mask | None = None,
) -> HistogramConfig:
    """Config with explicit intensity ranges; percentile ranges fill a missing one."""
    if cfg.intensity_range is not None:
        return cfg
    x_range = robust_range(fixed, cfg.percentiles, mask)
    y_range = robust_range(moving, cfg.percentiles, mask)
    logger.debug("Resolved intensity ranges fixed=%s moving=%s", x_range, y_range)
    return cfg.model_copy(update={"intensity_range": (x_range, y_range)})


class PatchwiseMI:
    """Mean local MI between a fixed image and any moving image on the same grid.

    The fixed image, its patches and (for soft binning) the fixed kernel weights are
    prepared once, so repeated evaluation against transformed moving images only bins
    the moving side.
    """

    def __init__(
        self,
        fixed: np.ndarray,
        grid: PatchGrid,
        cfg: HistogramConfig,
        mode: BinningMode = BinningMode.SOFT,
    ) -> None:
        if cfg.intensity_range is None:
            msg = "PatchwiseMI needs a config with resolved intensity ranges"
            raise HistogramError(msg)
        self.fixed = np.asarray(fixed, dtype=np.float64)
        self.grid = grid
        self.cfg = cfg
        self.mode = mode
        self.patches = patch_slices(self.fixed.shape, grid)
        if not self.patches:
            count = None if grid.restriction_mask is None else grid.restriction_mask.count
            msg = ERROR_MESSAGES["NO_PATCHES"].format(
                dims=self.fixed.shape, patch=grid.patch_size, stride=grid.stride, mask=count
            )
            raise HistogramError(msg)

        self._x_range, self._y_range = cfg.intensity_range
        self._fixed_cache: list[np.ndarray] | None = None
        if mode is BinningMode.SOFT:
            patch_voxels = math.prod(grid.patch_size)
            if len(self.patches) * patch_voxels * cfg.bins * 8 <= FIXED_WEIGHT_CACHE_BYTES:
                self._fixed_cache = [self._fixed_weights(sl) for sl in self.patches]

    @property
    def n_patches(self) -> int:
        return len(self.patches)

    def _fixed_weights(self, sl: PatchSlice) -> np.ndarray:
        u = bin_coordinates(self.fixed[sl].ravel(), self._x_range, self.cfg.bins)
        weights, _ = soft_bin_weights(u, self.cfg.bins, self.cfg.kernel_width)
        return weights

    def _fixed_for(self, index: int) -> np.ndarray:
        if self._fixed_cache is not None:
            return self._fixed_cache[index]
        return self._fixed_weights(self.patches[index])

    def _check(self, moving: np.ndarray) -> np.ndarray:
        arr = np.asarray(moving, dtype=np.float64)
        if arr.shape != self.fixed.shape:
            msg = ERROR_MESSAGES["DIMS_MISMATCH"].format(fixed=self.fixed.shape, moving=arr.shape)
            raise HistogramError(msg)
        return arr

    def patch_histogram(self, index: int, moving: np.ndarray) -> JointHistogram:
        sl = self.patches[index]
        if self.mode is BinningMode.HARD:
            return hard_joint_histogram(self.fixed[sl], moving[sl], self.cfg)
        u = bin_coordinates(moving[sl].ravel(), self._y_range, self.cfg.bins)
        wy, _ = soft_bin_weights(u, self.cfg.bins, self.cfg.kernel_width)
        wx = self._fixed_for(index)
        return JointHistogram.from_joint(wx.T @ wy / wy.shape[0])

    def patch_values(self, moving: np.ndarray) -> list[float]:
        """Local MI of every patch, in enumeration order."""
        arr = self._check(moving)
        return [local_mi(self.patch_histogram(i, arr), self.cfg) for i in range(self.n_patches)]

    def loss(self, moving: np.ndarray) -> float:
        """``1 - mean local MI``."""
        values = self.patch_values(moving)
        return 1.0 - math.fsum(values) / len(values)

    def gradient(self, moving: np.ndarray) -> np.ndarray:
        """Derivative of :meth:`loss` with respect to every moving voxel.

        Raises:
            HistogramError: In hard binning mode.
        """
        if self.mode is not BinningMode.SOFT:
            raise HistogramError(ERROR_MESSAGES["HARD_GRADIENT"])
        arr = self._check(moving)
        bins = self.cfg.bins
        eps = self.cfg.epsilon
        du_dv = bins / (self._y_range[1] - self._y_range[0])
        grad = np.zeros(arr.shape, dtype=np.float64)

        for index, sl in enumerate(self.patches):
            values = arr[sl]
            u = bin_coordinates(values.ravel(), self._y_range, bins)
            wy, dwy = soft_bin_weights(u, bins, self.cfg.kernel_width, with_derivative=True)
            assert dwy is not None
            wx = self._fixed_for(index)
            n = wy.shape[0]

            joint = wx.T @ wy / n
            px = joint.sum(axis=1)
            py = joint.sum(axis=0)
            outer = np.outer(px, py)
            nz = joint > 0

            # dMI/dP for the occupied cells, dMI/d(py) through the marginal
            d_joint = np.zeros_like(joint)
            p = joint[nz]
            d_joint[nz] = np.log(p + eps) + p / (p + eps) - np.log(outer[nz] + eps)
            d_py = -(joint * px[:, None] / (outer + eps)).sum(axis=0)

            sens = wx @ d_joint + d_py[None, :]
            dmi_du = np.einsum("sj,sj->s", dwy, sens) / n
            grad[sl] += (dmi_du * du_dv).reshape(values.shape)

        grad *= -1.0 / self.n_patches
        return grad


def _prepare(
    fixed: Volume,
    moving: Volume,
    grid: PatchGrid,
    cfg: HistogramConfig,
    mode: BinningMode,
) -> PatchwiseMI:
    if fixed.dims != moving.dims:
        msg = ERROR_MESSAGES["DIMS_MISMATCH"].format(fixed=fixed.dims, moving=moving.dims)
        raise HistogramError(msg)
    resolved = resolve_intensity_ranges(cfg, fixed.data, moving.data, grid.restriction_mask)
    return PatchwiseMI(fixed.data, grid, resolved, mode)


def mi_loss(
    fixed: Volume,
    moving: Volume,
    grid: PatchGrid,
    cfg: HistogramConfig,
    mode: BinningMode = BinningMode.SOFT,
) -> float:
    """Patch-local MI loss ``1 - mean local MI`` between two volumes on one grid.

    Args:
        fixed: Reference volume.
        moving: Volume already resampled onto the fixed grid.
        grid: Patch lattice, optionally restricted to a mask.
        cfg: Histogram settings.
        mode: Hard or soft binning.

    Returns:
        The loss; lower is better.

    Raises:
        HistogramError: If the dims differ or the grid selects no patches.
    """
    return _prepare(fixed, moving, grid, cfg, mode).loss(moving.data)


def mi_loss_gradient(
    fixed: Volume,
    moving: Volume,
    grid: PatchGrid,
    cfg: HistogramConfig,
    mode: BinningMode = BinningMode.SOFT,
) -> np.ndarray:
    """Gradient of :func:`mi_loss` with respect to the moving intensities.

    Returns:
        Array shaped like the volume, zero outside every selected patch.

    Raises:
        HistogramError: In hard mode, if the dims differ or the grid selects no patches.
    """
    if mode is not BinningMode.SOFT:
        raise HistogramError(ERROR_MESSAGES["HARD_GRADIENT"])
    return _prepare(fixed, moving, grid, cfg, mode).gradient(moving.data)
