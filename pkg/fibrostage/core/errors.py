"""Exception hierarchy shared by all fibrostage modules."""


class FibrostageError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(FibrostageError, ValueError):
    """Run configuration is malformed, has unknown keys or references missing files."""


class ImageIOError(FibrostageError, OSError):
    """A volume or mask file cannot be read or written."""


class GeometryError(FibrostageError, ValueError):
    """Volumes that must share a grid do not."""


class ManifestError(FibrostageError, ValueError):
    """A manifest record violates the study invariants."""


class HistogramError(FibrostageError, ValueError):
    """Invalid histogram input (length mismatch, empty arrays, no patches, wrong mode)."""


class RegistrationError(FibrostageError):
    """Registration could not be set up or evaluated."""


class PatchExtractionError(FibrostageError, ValueError):
    """Patches cannot be extracted from a study."""


class ClassifierError(FibrostageError, ValueError):
    """Training or prediction with the baseline classifier failed."""


class PredictionFormatError(FibrostageError, ValueError):
    """An external prediction file is malformed."""


class StagingError(FibrostageError, ValueError):
    """Subject scoring or probability mapping received invalid input."""


class CalibrationError(FibrostageError, ValueError):
    """Threshold calibration cannot proceed."""


class MetricError(FibrostageError, ValueError):
    """An evaluation metric received invalid input."""


class PhantomError(FibrostageError, ValueError):
    """A phantom specification is infeasible."""
