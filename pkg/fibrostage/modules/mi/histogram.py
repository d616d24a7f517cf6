"""Hard and Parzen-windowed joint histograms.

Intensities are mapped to a continuous bin coordinate ``u = (v - lo) / (hi - lo) * bins``
so that bin ``i`` covers ``[i, i + 1)``. The soft estimator spreads every sample over the
bins with a cubic B-spline kernel of width ``kernel_width`` bins; the weight of a bin is
the kernel mass that falls inside it, the first and last bins being open-ended. The
weights of one sample therefore sum to one, and shrinking the kernel width recovers hard
binning for samples away from bin edges.
"""

import numpy as np

from fibrostage.core.errors import HistogramError
from fibrostage.core.logger import get_logger
from fibrostage.modules.mi.constants import ERROR_MESSAGES
from fibrostage.modules.mi.schemas import HistogramConfig, JointHistogram, Range

logger = get_logger("modules.mi.histogram")


def bspline3(x: np.ndarray) -> np.ndarray:
    """Cubic B-spline kernel, supported on (-2, 2)."""
    ax = np.abs(x)
    inner = 2.0 / 3.0 - ax**2 + 0.5 * ax**3
    outer = (2.0 - ax) ** 3 / 6.0
    return np.where(ax < 1.0, inner, np.where(ax < 2.0, outer, 0.0))


def bspline3_cdf(x: np.ndarray) -> np.ndarray:
    """Cumulative integral of :func:`bspline3` from minus infinity."""
    ax = np.abs(x)
    inner = 2.0 * ax / 3.0 - ax**3 / 3.0 + ax**4 / 8.0
    outer = 0.5 - (2.0 - ax) ** 4 / 24.0
    half = np.where(ax < 1.0, inner, np.where(ax < 2.0, outer, 0.5))
    return 0.5 + np.sign(x) * half


def bin_coordinates(values: np.ndarray, value_range: Range, bins: int) -> np.ndarray:
    """Continuous bin coordinate of every value."""
    lo, hi = value_range
    return (np.asarray(values, dtype=np.float64) - lo) * (bins / (hi - lo))


def hard_bin_indices(values: np.ndarray, value_range: Range, bins: int) -> np.ndarray:
    """Bin index of every value; out-of-range values land in the edge bins."""
    u = bin_coordinates(values, value_range, bins)
    return np.clip(np.floor(u), 0, bins - 1).astype(np.intp)


def soft_bin_weights(
    u: np.ndarray,
    bins: int,
    kernel_width: float,
    with_derivative: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Kernel weights of every sample over all bins.

    Args:
        u: Bin coordinates, shape (n,).
        bins: Number of bins.
        kernel_width: Kernel width in bins.
        with_derivative: Also return d(weight)/du.

    Returns:
        Weights of shape (n, bins), rows summing to one, and optionally their derivative.
    """
    u = np.asarray(u, dtype=np.float64)
    inner_edges = np.arange(1, bins, dtype=np.float64)
    z = (inner_edges[None, :] - u[:, None]) / kernel_width

    n = u.shape[0]
    cdf = np.empty((n, bins + 1), dtype=np.float64)
    cdf[:, 0] = 0.0
    cdf[:, -1] = 1.0
    cdf[:, 1:-1] = bspline3_cdf(z)
    weights = np.diff(cdf, axis=1)

    if not with_derivative:
        return weights, None

    # d cdf(e - u) / du = -kernel(e - u); open edges have no derivative
    density = np.zeros((n, bins + 1), dtype=np.float64)
    density[:, 1:-1] = bspline3(z) / kernel_width
    derivative = density[:, :-1] - density[:, 1:]
    return weights, derivative


def _validate_pair(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    xs = np.ravel(np.asarray(x, dtype=np.float64))
    ys = np.ravel(np.asarray(y, dtype=np.float64))
    if xs.size != ys.size:
        msg = ERROR_MESSAGES["LENGTH_MISMATCH"].format(nx=xs.size, ny=ys.size)
        raise HistogramError(msg)
    if xs.size == 0:
        raise HistogramError(ERROR_MESSAGES["EMPTY"])
    return xs, ys


def data_range(values: np.ndarray) -> Range:
    """Min/max of ``values``, widened around constant data so the range is never empty."""
    lo = float(np.min(values))
    hi = float(np.max(values))
    if hi <= lo:
        return lo - 0.5, lo + 0.5
    return lo, hi


def _ranges(cfg: HistogramConfig, xs: np.ndarray, ys: np.ndarray) -> tuple[Range, Range]:
    if cfg.intensity_range is not None:
        return cfg.intensity_range
    return data_range(xs), data_range(ys)


def hard_joint_histogram(x: np.ndarray, y: np.ndarray, cfg: HistogramConfig) -> JointHistogram:
    """Normalized joint histogram with one count per sample.

    Args:
        x: Fixed intensities.
        y: Moving intensities, same length as ``x``.
        cfg: Binning; without an explicit range the data range of each array is used.

    Returns:
        JointHistogram with ``cfg.bins`` bins per axis.

    Raises:
        HistogramError: On empty arrays or a length mismatch.
    """
    xs, ys = _validate_pair(x, y)
    x_range, y_range = _ranges(cfg, xs, ys)
    bins = cfg.bins
    ix = hard_bin_indices(xs, x_range, bins)
    iy = hard_bin_indices(ys, y_range, bins)
    counts = np.bincount(ix * bins + iy, minlength=bins * bins).astype(np.float64)
    return JointHistogram.from_joint(counts.reshape(bins, bins) / xs.size)


def soft_joint_histogram(x: np.ndarray, y: np.ndarray, cfg: HistogramConfig) -> JointHistogram:
    """Normalized joint histogram with B-spline Parzen windowing.

    Args:
        x: Fixed intensities.
        y: Moving intensities, same length as ``x``.
        cfg: Binning and kernel width.

    Returns:
        JointHistogram whose entries are differentiable in the sample values.

    Raises:
        HistogramError: On empty arrays or a length mismatch.
    """
    xs, ys = _validate_pair(x, y)
    x_range, y_range = _ranges(cfg, xs, ys)
    wx, _ = soft_bin_weights(bin_coordinates(xs, x_range, cfg.bins), cfg.bins, cfg.kernel_width)
    wy, _ = soft_bin_weights(bin_coordinates(ys, y_range, cfg.bins), cfg.bins, cfg.kernel_width)
    return JointHistogram.from_joint(wx.T @ wy / xs.size)
