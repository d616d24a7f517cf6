"""Constants and error messages for the mutual information module."""

# Histogram defaults for the registration loss
DEFAULT_BINS = 32
DEFAULT_EPSILON = 1e-6
DEFAULT_KERNEL_WIDTH = 1.0  # in bins

# Robust intensity range: percentiles computed over the restriction mask
DEFAULT_PERCENTILES = (0.5, 99.5)

# Patch grid defaults (voxels)
DEFAULT_PATCH_SIZE = (16, 16, 16)
DEFAULT_PATCH_STRIDE = (8, 8, 8)

# Tolerance of the JointHistogram invariants
JOINT_SUM_TOL = 1e-9
MARGINAL_TOL = 1e-12

# Fixed-image kernel weights are cached per patch while they fit in this budget
FIXED_WEIGHT_CACHE_BYTES = 64 * 1024 * 1024

ERROR_MESSAGES = {
    "LENGTH_MISMATCH": "Patch arrays differ in length: {nx} vs {ny}",
    "EMPTY": "Cannot build a histogram from empty arrays",
    "NO_PATCHES": "Patch grid selects no patches (dims {dims}, patch {patch}, stride {stride}, mask voxels {mask})",
    "DIMS_MISMATCH": "Fixed and moving volumes differ in dims: {fixed} vs {moving}",
    "HARD_GRADIENT": "Gradient requires soft binning; hard histograms have zero gradient almost everywhere",
    "MASK_DIMS": "Restriction mask dims {mask} do not match volume dims {dims}",
}
