"""Constants and error messages for the baseline patch classifier."""

# Per-channel features: mean, std, median, histogram, gradient-magnitude mean and std
HISTOGRAM_BINS = 8
HISTOGRAM_RANGE = (-3.0, 3.0)
FEATURES_PER_CHANNEL = 3 + HISTOGRAM_BINS + 2

DEFAULT_EPOCHS = 500
DEFAULT_LEARNING_RATE = 0.5
DEFAULT_WEIGHT_DECAY = 1e-4
DEFAULT_SEED = 0
INIT_SCALE = 0.01

DECISION_THRESHOLD = 0.5

PREDICTION_HEADER = ("subject_id", "z", "y", "x", "prob")

ERROR_MESSAGES = {
    "SINGLE_CLASS": "Training needs both labels, got only {labels}",
    "UNLABELED": "Training patch {index} has no label",
    "EMPTY": "Training set is empty",
    "DIMENSION": "Model expects {expected} features, got {actual}",
    "MODEL_UNREADABLE": "Cannot read model {path}: {error}",
    "ROW": "{path}:{line}: {error}",
    "PROB_RANGE": "prob {prob} outside [0, 1]",
    "COLUMNS": "expected {expected} columns, got {actual}",
    "HEADER": "{path}: header must be {header}",
}
