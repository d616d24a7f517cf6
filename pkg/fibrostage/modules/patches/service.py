"""Extraction of overlapping multi-channel axial patches from the masked organ."""

import math

import numpy as np

from fibrostage.common.utils import ordered_map
from fibrostage.core.errors import PatchExtractionError
from fibrostage.core.logger import get_logger, subject_context
from fibrostage.modules.imgcore.constants import REFERENCE_MODALITY
from fibrostage.modules.imgcore.schemas import Study
from fibrostage.modules.patches.augment import balance_by_augmentation
from fibrostage.modules.patches.constants import BALANCE_RATIO, ERROR_MESSAGES, LABEL_STAGE
from fibrostage.modules.patches.schemas import Patch, PatchExtractionConfig

logger = get_logger("modules.patches.service")


def normalized_channels(study: Study) -> np.ndarray:
    """Channel stack ``[K, x, y, z]`` masked by the organ and z-scored over it.

    Channels the study lacks are all-zero. A channel that is constant over the mask keeps
    unit scale.

    Raises:
        PatchExtractionError: If the mask is missing or empty, or a modality is off-grid.
    """
    if study.mask is None:
        raise PatchExtractionError(ERROR_MESSAGES["NO_MASK"].format(subject=study.subject_id))
    if study.mask.is_empty:
        raise PatchExtractionError(ERROR_MESSAGES["EMPTY_MASK"].format(subject=study.subject_id))
    reference = study.reference.geometry
    for name, volume in study.modalities.items():
        if not volume.geometry.matches(reference):
            msg = ERROR_MESSAGES["GEOMETRY"].format(
                subject=study.subject_id, modality=name, reference=REFERENCE_MODALITY
            )
            raise PatchExtractionError(msg)

    omega = study.mask.voxels
    stack = np.zeros((len(study.channels), *reference.dims), dtype=np.float64)
    for k, name in enumerate(study.channels):
        volume = study.modalities.get(name)
        if volume is None:
            continue
        values = volume.data.astype(np.float64)
        inside = values[omega]
        mean = float(inside.mean())
        std = float(inside.std())
        if std == 0.0:
            std = 1.0
        stack[k] = np.where(omega, (values - mean) / std, 0.0)
    return stack


def lattice_starts(lo: int, hi: int, dim: int, size: int, stride: int) -> list[int]:
    """Window starts along one axis: from the mask corner, while inside the mask box and the image."""
    if dim < size:
        return []
    start = min(max(lo, 0), dim - size)
    return list(range(start, min(hi, dim - size) + 1, stride))


def extract_patches(study: Study, cfg: PatchExtractionConfig) -> list[Patch]:
    """Patches of an aligned study in (z, y, x) order.

    Args:
        study: Study whose modalities share the GED4 grid and which carries a mask.
        cfg: Window size, stride and minimum mask coverage.

    Returns:
        Unlabeled patches whose coverage is at least ``cfg.min_coverage``.

    Raises:
        PatchExtractionError: On a missing or empty mask, or off-grid modalities.
    """
    stack = normalized_channels(study)
    assert study.mask is not None
    box = study.mask.bounding_box()
    assert box is not None
    (x_lo, y_lo, z_lo), (x_hi, y_hi, z_hi) = box
    nx, ny, _ = study.mask.dims
    size = cfg.patch_size
    xs = lattice_starts(x_lo, x_hi, nx, size, cfg.stride)
    ys = lattice_starts(y_lo, y_hi, ny, size, cfg.stride)
    area = float(size * size)

    patches: list[Patch] = []
    for z in range(z_lo, z_hi + 1):
        mask_slice = study.mask.data[:, :, z].T
        if not mask_slice.any():
            continue
        channels_slice = stack[:, :, :, z].transpose(0, 2, 1)
        for y0 in ys:
            for x0 in xs:
                support = mask_slice[y0 : y0 + size, x0 : x0 + size]
                coverage = float(np.count_nonzero(support)) / area
                if coverage < cfg.min_coverage:
                    continue
                patches.append(
                    Patch(
                        subject_id=study.subject_id,
                        slice_index=z,
                        grid_xy=(x0, y0),
                        data=channels_slice[:, y0 : y0 + size, x0 : x0 + size],
                        support=support,
                        coverage=coverage,
                        channels=study.channels,
                    )
                )
    logger.debug("Extracted %d patches from %d slices", len(patches), z_hi - z_lo + 1)
    return patches


def _labeled_patches(study: Study, cfg: PatchExtractionConfig) -> list[Patch]:
    with subject_context(study.subject_id):
        label = LABEL_STAGE[study.stage] if study.stage is not None else None
        return [p.model_copy(update={"label": label}) for p in extract_patches(study, cfg)]


def build_training_set(studies: list[Study], cfg: PatchExtractionConfig, jobs: int = 1) -> list[Patch]:
    """Labeled, class-balanced patches from Stage-1 (label 0) and Stage-4 (label 1) subjects.

    Stage-2/3 subjects contribute nothing. The minority class is topped up with dihedral
    copies of its own patches until it reaches 95% of the majority.

    Raises:
        PatchExtractionError: If any study lacks a stage.
    """
    for study in studies:
        if study.stage is None:
            raise PatchExtractionError(ERROR_MESSAGES["MISSING_STAGE"].format(subject=study.subject_id))
    selected = [s for s in studies if s.stage in LABEL_STAGE]
    skipped = len(studies) - len(selected)
    if skipped:
        logger.info("Excluding %d Stage-2/3 subjects from training", skipped)

    patches = [p for batch in ordered_map(lambda s: _labeled_patches(s, cfg), selected, jobs) for p in batch]
    negatives = [p for p in patches if p.label == 0]
    positives = [p for p in patches if p.label == 1]
    if not negatives or not positives:
        logger.warning("Training set has a single class (%d vs %d patches)", len(negatives), len(positives))
        return patches

    minority, majority = (negatives, positives) if len(negatives) < len(positives) else (positives, negatives)
    target = math.ceil(BALANCE_RATIO * len(majority))
    if target > 8 * len(minority):
        logger.warning("Minority class too small to balance without repeating transforms")
    extra = balance_by_augmentation(minority, target)
    if extra:
        logger.info("Augmented minority class: %d -> %d patches", len(minority), len(minority) + len(extra))
    return patches + extra
