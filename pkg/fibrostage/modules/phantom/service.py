"""Synthetic multi-modal studies with known masks, lesions and misalignments."""

from pathlib import Path

import numpy as np
from scipy import ndimage

from fibrostage.common.utils import dump_json
from fibrostage.core.errors import PhantomError
from fibrostage.core.logger import get_logger
from fibrostage.modules.imgcore.constants import REFERENCE_MODALITY
from fibrostage.modules.imgcore.io import save_mask, save_volume
from fibrostage.modules.imgcore.manifest import ManifestRecord, write_manifest
from fibrostage.modules.imgcore.schemas import Geometry, Mask, Study, Volume
from fibrostage.modules.phantom.constants import (
    BACKGROUND_LEVEL,
    ERROR_MESSAGES,
    GROUND_TRUTH_FILE,
    MANIFEST_FILE,
    MISALIGN_ROTATION,
    MISALIGN_TRANSLATION,
    ORGAN_LEVEL,
)
from fibrostage.modules.phantom.schemas import CohortSpec, PhantomResult, PhantomSpec
from fibrostage.modules.reg.resample import resample_linear
from fibrostage.modules.reg.schemas import RigidTransform
from fibrostage.modules.staging.schemas import CalibrationSample

logger = get_logger("modules.phantom.service")

_NEIGHBOURS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def _geometry(spec: PhantomSpec) -> Geometry:
    return Geometry(dims=spec.dims, spacing=spec.spacing)


def organ_mask(spec: PhantomSpec) -> np.ndarray:
    """Boolean ellipsoid sampled at voxel centres.

    Raises:
        PhantomError: If the ellipsoid leaves the field of view.
    """
    geometry = _geometry(spec)
    center = np.asarray(spec.organ.center if spec.organ.center is not None else geometry.center)
    axes = np.asarray(spec.organ.semi_axes)
    fov_hi = np.asarray(geometry.voxel_to_world(np.asarray(spec.dims) - 1))
    fov_lo = np.asarray(geometry.origin)
    if np.any(center - axes < fov_lo) or np.any(center + axes > fov_hi):
        msg = ERROR_MESSAGES["ORGAN_OUTSIDE"].format(
            center=tuple(center.tolist()), axes=tuple(axes.tolist()), fov=(tuple(fov_lo), tuple(fov_hi.tolist()))
        )
        raise PhantomError(msg)

    idx = np.indices(spec.dims, dtype=np.float64)
    spacing = np.asarray(spec.spacing)[:, None, None, None]
    origin = np.asarray(geometry.origin)[:, None, None, None]
    rel = (idx * spacing + origin - center[:, None, None, None]) / axes[:, None, None, None]
    return (rel**2).sum(axis=0) <= 1.0


def grow_lesion(organ: np.ndarray, fraction: float, seeds: int, rng: np.random.Generator) -> np.ndarray:
    """Random blobs grown voxel by voxel inside ``organ`` to ``round(fraction * |organ|)`` voxels.

    Each step adds a random frontier voxel; a new seed is planted whenever the frontier
    runs dry, so the target count is always met exactly.
    """
    organ_idx = np.flatnonzero(organ)
    target = int(round(fraction * organ_idx.size))
    lesion = np.zeros(organ.shape, dtype=bool)
    if target == 0:
        return lesion
    if target >= organ_idx.size:
        return organ.copy()

    shape = organ.shape
    in_frontier = np.zeros(organ.shape, dtype=bool)
    frontier: list[tuple[int, int, int]] = []

    def plant() -> None:
        remaining = organ_idx[~lesion.ravel()[organ_idx] & ~in_frontier.ravel()[organ_idx]]
        voxel = np.unravel_index(int(rng.choice(remaining)), shape)
        key = (int(voxel[0]), int(voxel[1]), int(voxel[2]))
        in_frontier[key] = True
        frontier.append(key)

    for _ in range(min(seeds, target)):
        plant()

    count = 0
    while count < target:
        if not frontier:
            plant()
        pick = int(rng.integers(len(frontier)))
        frontier[pick], frontier[-1] = frontier[-1], frontier[pick]
        voxel = frontier.pop()
        lesion[voxel] = True
        count += 1
        x, y, z = voxel
        for dx, dy, dz in _NEIGHBOURS:
            n = (x + dx, y + dy, z + dz)
            if not (0 <= n[0] < shape[0] and 0 <= n[1] < shape[1] and 0 <= n[2] < shape[2]):
                continue
            if organ[n] and not lesion[n] and not in_frontier[n]:
                in_frontier[n] = True
                frontier.append(n)
    return lesion


def random_transform(rng: np.random.Generator, center: np.ndarray) -> RigidTransform:
    rotation = rng.uniform(-MISALIGN_ROTATION, MISALIGN_ROTATION, size=3)
    translation = rng.uniform(-MISALIGN_TRANSLATION, MISALIGN_TRANSLATION, size=3)
    return RigidTransform(
        rotation=(float(rotation[0]), float(rotation[1]), float(rotation[2])),
        translation=(float(translation[0]), float(translation[1]), float(translation[2])),
        center=(float(center[0]), float(center[1]), float(center[2])),
    )


def generate(spec: PhantomSpec) -> PhantomResult:
    """Render one subject: a GED4 reference and remapped, misaligned moving channels.

    The reference is a smoothed organ on a dim background with speckle of standard
    deviation ``texture_contrast`` on lesion voxels, plus Gaussian noise. Every other
    channel is a monotone remap of the reference resampled through the inverse of its
    planted transform, so registering it back recovers the planted transform.

    Raises:
        PhantomError: If the organ does not fit the grid.
    """
    rng = np.random.default_rng(spec.seed)
    geometry = _geometry(spec)
    organ = organ_mask(spec)
    lesion = grow_lesion(organ, spec.lesion_fraction, spec.lesion_seeds, rng)

    base = np.where(organ, ORGAN_LEVEL, BACKGROUND_LEVEL)
    if spec.smoothing > 0:
        base = ndimage.gaussian_filter(base, sigma=spec.smoothing)
    speckle = rng.normal(0.0, 1.0, size=spec.dims) * spec.texture_contrast
    reference = base + np.where(lesion, speckle, 0.0)
    reference += rng.normal(0.0, spec.noise_sigma, size=spec.dims) if spec.noise_sigma > 0 else 0.0
    reference = np.clip(reference, 0.0, None)
    vmax = float(reference.max()) or 1.0

    ref_volume = Volume(geometry=geometry, data=reference)
    modalities: dict[str, Volume] = {REFERENCE_MODALITY: ref_volume}
    for name in spec.modalities:
        if name == REFERENCE_MODALITY:
            continue
        remapped = Volume(geometry=geometry, data=spec.modality_maps[name].apply(reference, vmax))
        planted = spec.planted_transforms.get(name)
        modalities[name] = remapped if planted is None else resample_linear(remapped, planted.inverse(), geometry)

    realized = float(lesion.sum()) / float(organ.sum())
    study = Study(
        subject_id=spec.subject_id,
        modalities=modalities,
        mask=Mask(geometry=geometry, data=organ),
        stage=spec.stage,
        contrast_mode=spec.contrast_mode,
        group=spec.group,
    )
    logger.debug("Phantom %s: lesion fraction %.4f", spec.subject_id, realized)
    return PhantomResult(
        study=study,
        lesion=Mask(geometry=geometry, data=lesion),
        transforms=dict(spec.planted_transforms),
        lesion_fraction=realized,
    )


def synthetic_scores(
    n_per_stage: tuple[int, int, int, int],
    stage_means: tuple[float, float, float, float],
    sigma: float,
    seed: int,
) -> list[CalibrationSample]:
    """Gaussian subject scores per stage, clamped to [0, 1], for calibration experiments.

    Raises:
        PhantomError: If the means do not increase with stage.
    """
    if len(n_per_stage) != 4 or len(stage_means) != 4:
        raise PhantomError(ERROR_MESSAGES["SCORE_ARGS"])
    if any(a >= b for a, b in zip(stage_means, stage_means[1:], strict=False)):
        raise PhantomError(ERROR_MESSAGES["MEANS"].format(means=stage_means))
    rng = np.random.default_rng(seed)
    samples: list[CalibrationSample] = []
    for stage, (n, mean) in enumerate(zip(n_per_stage, stage_means, strict=True), start=1):
        draws = np.clip(rng.normal(mean, sigma, size=n), 0.0, 1.0)
        samples += [
            CalibrationSample(subject_id=f"synthetic-S{stage}-{i:03d}", s=float(s), stage=stage)
            for i, s in enumerate(draws)
        ]
    return samples


def generate_cohort(cohort: CohortSpec) -> list[PhantomResult]:
    """Render every subject of ``cohort``; subject ``i`` uses seed ``base.seed + i``."""
    results: list[PhantomResult] = []
    index = 0
    geometry = _geometry(cohort.base)
    for entry in cohort.entries:
        for _ in range(entry.count):
            seed = cohort.base.seed + index
            planted: dict[str, RigidTransform] = {}
            if cohort.misalign:
                rng = np.random.default_rng([seed, 1])
                planted = {
                    name: random_transform(rng, geometry.center)
                    for name in cohort.base.modalities
                    if name != REFERENCE_MODALITY
                }
            spec = cohort.base.model_copy(
                update={
                    "subject_id": f"P{index + 1:03d}",
                    "lesion_fraction": entry.lesion_fraction,
                    "stage": entry.stage,
                    "group": entry.group,
                    "seed": seed,
                    "planted_transforms": planted,
                }
            )
            results.append(generate(spec))
            index += 1
    logger.info("Generated %d phantom subjects", len(results))
    return results


def write_cohort(results: list[PhantomResult], out_dir: str | Path) -> Path:
    """Write NIfTI files, a manifest and a ground-truth sidecar; return the manifest path."""
    out = Path(out_dir)
    records: list[ManifestRecord] = []
    truth: dict[str, object] = {}
    for result in results:
        study = result.study
        subject_dir = out / study.subject_id
        modalities: dict[str, str] = {}
        for name, volume in study.modalities.items():
            save_volume(volume, subject_dir / f"{name}.nii")
            modalities[name] = f"{study.subject_id}/{name}.nii"
        assert study.mask is not None
        save_mask(study.mask, subject_dir / "mask.nii")
        save_mask(result.lesion, subject_dir / "lesion.nii")
        records.append(
            ManifestRecord(
                subject_id=study.subject_id,
                stage=study.stage,
                mask=f"{study.subject_id}/mask.nii",
                modalities=modalities,
                group=study.group,
            )
        )
        truth[study.subject_id] = {
            "stage": study.stage,
            "group": study.group,
            "lesion_fraction": result.lesion_fraction,
            "lesion_mask": f"{study.subject_id}/lesion.nii",
            "transforms": {name: t.model_dump(mode="json") for name, t in result.transforms.items()},
        }
    manifest = out / MANIFEST_FILE
    write_manifest(records, manifest)
    dump_json(truth, out / GROUND_TRUTH_FILE)
    return manifest
