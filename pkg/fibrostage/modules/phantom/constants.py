"""Defaults for synthetic phantoms."""

DEFAULT_DIMS = (64, 64, 32)
DEFAULT_SPACING = (1.5, 1.5, 3.0)
DEFAULT_SEMI_AXES = (36.0, 30.0, 33.0)  # mm

BACKGROUND_LEVEL = 0.1
ORGAN_LEVEL = 0.6
DEFAULT_SMOOTHING = 1.0  # voxels
DEFAULT_NOISE_SIGMA = 0.02
DEFAULT_TEXTURE_CONTRAST = 0.3
DEFAULT_LESION_SEEDS = 3

# Per-channel remap r(v) = offset + scale * clip(v / vmax, 0, 1) ** gamma; T2 is inverted
DEFAULT_CHANNEL_MAPS = {
    "T1": (0.1, 0.9, 0.5),
    "T2": (1.3, -1.2, 2.0),
    "DWI": (0.2, 0.6, 1.5),
    "GED1": (0.0, 0.8, 0.8),
    "GED2": (0.05, 0.9, 1.2),
    "GED3": (0.1, 1.0, 0.7),
}

# Random misalignment used by cohorts: rotation (rad) and translation (mm) bounds
MISALIGN_ROTATION = 0.05
MISALIGN_TRANSLATION = 3.0

GROUND_TRUTH_FILE = "ground_truth.json"
MANIFEST_FILE = "manifest.json"

ERROR_MESSAGES = {
    "ORGAN_OUTSIDE": "Organ ellipsoid (center {center}, semi-axes {axes}) does not fit in the field of view {fov}",
    "MEANS": "stage_means must increase with stage, got {means}",
    "SCORE_ARGS": "n_per_stage and stage_means need 4 entries each",
}
