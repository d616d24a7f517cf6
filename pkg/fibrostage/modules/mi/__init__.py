from fibrostage.modules.mi.histogram import (
    bspline3,
    bspline3_cdf,
    hard_joint_histogram,
    soft_bin_weights,
    soft_joint_histogram,
)
from fibrostage.modules.mi.ncc import PatchwiseNCC, local_ncc
from fibrostage.modules.mi.schemas import BinningMode, HistogramConfig, JointHistogram, PatchGrid
from fibrostage.modules.mi.service import (
    PatchwiseMI,
    local_mi,
    mi_loss,
    mi_loss_gradient,
    patch_slices,
    resolve_intensity_ranges,
    robust_range,
)

__all__ = [
    "BinningMode",
    "HistogramConfig",
    "JointHistogram",
    "PatchGrid",
    "PatchwiseMI",
    "PatchwiseNCC",
    "bspline3",
    "bspline3_cdf",
    "hard_joint_histogram",
    "local_mi",
    "local_ncc",
    "mi_loss",
    "mi_loss_gradient",
    "patch_slices",
    "resolve_intensity_ranges",
    "robust_range",
    "soft_bin_weights",
    "soft_joint_histogram",
]
