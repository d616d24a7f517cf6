"""Constants and error messages for patch extraction."""

DEFAULT_PATCH_SIZE = 16
DEFAULT_STRIDE = 8
DEFAULT_MIN_COVERAGE = 0.5

# Minority class is augmented until it reaches this fraction of the majority
BALANCE_RATIO = 0.95

LABEL_STAGE = {1: 0, 4: 1}

DATASET_MAGIC = b"FBPATCH1\n"
DATASET_VERSION = 1

ERROR_MESSAGES = {
    "NO_MASK": "Subject {subject} has no mask",
    "EMPTY_MASK": "Subject {subject} has an empty mask",
    "GEOMETRY": "Subject {subject}: modality {modality} is not on the {reference} grid; register first",
    "MISSING_STAGE": "Subject {subject} has no stage label",
    "DATASET_UNREADABLE": "Cannot read patch dataset {path}: {error}",
    "DATASET_EMPTY_WRITE": "Cannot infer channel layout of an empty patch dataset without channels",
}
