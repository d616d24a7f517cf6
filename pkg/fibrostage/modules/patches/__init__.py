from fibrostage.modules.patches.augment import TRANSFORM_NAMES, augment_patch, balance_by_augmentation
from fibrostage.modules.patches.schemas import Patch, PatchExtractionConfig
from fibrostage.modules.patches.service import build_training_set, extract_patches, normalized_channels
from fibrostage.modules.patches.storage import load_patch_dataset, save_patch_dataset

__all__ = [
    "TRANSFORM_NAMES",
    "Patch",
    "PatchExtractionConfig",
    "augment_patch",
    "balance_by_augmentation",
    "build_training_set",
    "extract_patches",
    "load_patch_dataset",
    "normalized_channels",
    "save_patch_dataset",
]
