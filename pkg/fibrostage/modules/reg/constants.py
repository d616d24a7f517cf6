"""Constants and error messages for rigid registration."""

# Pyramid: (downsample factor, max iterations), coarse to fine
DEFAULT_LEVELS = ((4, 100), (2, 100), (1, 50))

# Optimizer, step sizes are in units of the level's mean voxel spacing
DEFAULT_STEP_INIT = 1.0
DEFAULT_STEP_SHRINK = 0.5
DEFAULT_MIN_STEP = 0.01
DEFAULT_CONVERGE_TOL = 1e-5

# Central-difference steps for the transform parameters
FD_ROTATION_STEP = 1e-3  # rad
FD_TRANSLATION_FRACTION = 0.1  # of the level spacing

# Out-of-bounds fill value of resampled volumes
FILL_VALUE = 0.0

TRANSFORM_DIGITS = 17

ERROR_MESSAGES = {
    "NO_PATCHES": "No patches in the overlap at level {factor}x: {error}",
    "TRANSFORM_UNREADABLE": "Cannot read transform {path}: {error}",
    "MASK_GEOMETRY": "Fixed mask geometry does not match the fixed volume",
    "MISSING_MASK": "Subject {subject} has no mask to propagate",
}
