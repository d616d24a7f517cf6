from fibrostage.modules.reg.resample import (
    downsample_mask,
    downsample_volume,
    forward_differences,
    linear_derivatives,
    resample_linear,
    resample_nearest,
)
from fibrostage.modules.reg.schemas import (
    LevelTrace,
    RegistrationConfig,
    RegistrationResult,
    RegistrationStatus,
    RigidTransform,
)
from fibrostage.modules.reg.service import AlignedStudy, align_study, propagate_mask, register_rigid

__all__ = [
    "AlignedStudy",
    "LevelTrace",
    "RegistrationConfig",
    "RegistrationResult",
    "RegistrationStatus",
    "RigidTransform",
    "align_study",
    "downsample_mask",
    "downsample_volume",
    "forward_differences",
    "linear_derivatives",
    "propagate_mask",
    "register_rigid",
    "resample_linear",
    "resample_nearest",
]
