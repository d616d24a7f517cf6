"""Constants and error messages for subject staging."""

# Published operating points per contrast mode: (tau1, tau2)
DEFAULT_THRESHOLDS = {
    "noncontrast": (0.37, 0.66),
    "contrast": (0.35, 0.70),
}

DEFAULT_FOLDS = 4
DEFAULT_GRID_STEP = 0.01
GRID_DIGITS = 10  # decimals kept on threshold grid points

REPORT_HEADER = ("subject_id", "n_patches", "s", "y1", "y4", "task1", "task2")

ERROR_MESSAGES = {
    "EMPTY": "No patch predictions to score",
    "MIXED": "Predictions mix subjects: {subjects}",
    "SCORE_DOMAIN": "Score s must lie in [0, 1], got {s}",
    "TAU_DOMAIN": "Threshold must lie in (0, 1), got {tau}",
    "NO_SAMPLES": "Calibration needs at least one (score, stage) sample",
    "FOLDS": "Calibration needs at least 2 folds, got {folds}",
    "GRID_STEP": "grid_step must lie in (0, 0.5], got {step}",
    "STAGE": "Stage must be in 1..4, got {stage}",
    "THRESHOLDS_UNREADABLE": "Cannot read thresholds {path}: {error}",
}
