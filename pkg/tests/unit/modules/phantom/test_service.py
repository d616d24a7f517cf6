"""Tests for synthetic phantom generation."""

from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from fibrostage.common.utils import load_json
from fibrostage.core.errors import PhantomError
from fibrostage.modules.imgcore import load_manifest
from fibrostage.modules.phantom import (
    ChannelMap,
    CohortEntry,
    CohortSpec,
    Ellipsoid,
    PhantomSpec,
    generate,
    generate_cohort,
    grow_lesion,
    organ_mask,
    synthetic_scores,
    write_cohort,
)
from fibrostage.modules.phantom.constants import MISALIGN_ROTATION, MISALIGN_TRANSLATION
from fibrostage.modules.reg import RigidTransform

BASE = PhantomSpec(dims=(24, 24, 8), organ=Ellipsoid(semi_axes=(12.0, 10.0, 9.0)), seed=3)


class TestOrgan:
    """Tests for organ_mask / grow_lesion."""

    def test_organ_inside_grid(self):
        organ = organ_mask(BASE)
        assert organ.shape == BASE.dims
        assert organ[12, 12, 4]
        assert not organ[0, 0, 0]

    def test_organ_outside_grid(self):
        with pytest.raises(PhantomError):
            _ = organ_mask(PhantomSpec(dims=(16, 16, 8)))

    @pytest.mark.parametrize("fraction", [0.05, 0.3, 0.8])
    def test_lesion_size_is_exact(self, fraction: float):
        organ = organ_mask(BASE)
        lesion = grow_lesion(organ, fraction, 3, np.random.default_rng(0))
        assert lesion.sum() == round(fraction * organ.sum())
        assert not (lesion & ~organ).any()

    def test_lesion_extremes(self):
        organ = organ_mask(BASE)
        assert not grow_lesion(organ, 0.0, 3, np.random.default_rng(0)).any()
        assert np.array_equal(grow_lesion(organ, 1.0, 3, np.random.default_rng(0)), organ)

    def test_lesion_is_seeded(self):
        organ = organ_mask(BASE)
        a = grow_lesion(organ, 0.2, 2, np.random.default_rng(5))
        b = grow_lesion(organ, 0.2, 2, np.random.default_rng(5))
        assert np.array_equal(a, b)


class TestGenerate:
    """Tests for generate."""

    def test_deterministic(self):
        spec = BASE.model_copy(update={"lesion_fraction": 0.3})
        a = generate(spec)
        b = generate(spec)
        for name, volume in a.study.modalities.items():
            assert np.array_equal(volume.data, b.study.modalities[name].data)
        assert np.array_equal(a.lesion.data, b.lesion.data)

    def test_study_layout(self):
        result = generate(BASE.model_copy(update={"lesion_fraction": 0.3, "stage": 3, "group": "ID"}))
        study = result.study
        assert set(study.modalities) == {"GED4", "T1", "T2", "DWI"}
        assert study.mask is not None
        assert np.array_equal(study.mask.voxels, organ_mask(BASE))
        assert (study.stage, study.group) == (3, "ID")
        assert result.lesion_fraction == pytest.approx(0.3, abs=0.01)
        assert result.transforms == {}

    def test_channels_are_monotone_remaps(self):
        spec = BASE.model_copy(update={"lesion_fraction": 0.3})
        result = generate(spec)
        reference = result.study.reference.data.ravel().astype(np.float64)
        order = np.argsort(reference, kind="stable")
        for name in ("T1", "T2", "DWI"):
            remapped = result.study.modalities[name].data.ravel().astype(np.float64)[order]
            direction = np.sign(spec.modality_maps[name].scale)
            assert np.all(direction * np.diff(remapped) >= -1e-6)

    def test_default_t2_is_inverted(self):
        assert BASE.modality_maps["T2"].scale < 0
        assert BASE.modality_maps["T1"].scale > 0

    def test_lesion_adds_texture(self):
        clean = generate(BASE).study.reference.data
        lesioned = generate(BASE.model_copy(update={"lesion_fraction": 0.5})).study.reference.data
        organ = organ_mask(BASE)
        assert lesioned[organ].std() > clean[organ].std()

    def test_planted_transform_moves_channel(self):
        planted = RigidTransform(translation=(3.0, 0.0, 0.0), center=(17.25, 17.25, 10.5))
        spec = BASE.model_copy(update={"planted_transforms": {"T1": planted}})
        aligned = generate(BASE).study.modalities["T1"].data
        moved = generate(spec)
        assert moved.transforms == {"T1": planted}
        assert not np.allclose(moved.study.modalities["T1"].data, aligned)
        assert np.array_equal(moved.study.modalities["T2"].data, generate(BASE).study.modalities["T2"].data)

    def test_planted_transform_on_reference_rejected(self):
        with pytest.raises(ValidationError):
            _ = PhantomSpec(planted_transforms={"GED4": RigidTransform()})

    def test_unknown_modality_rejected(self):
        with pytest.raises(ValidationError):
            _ = PhantomSpec(modalities=("T1", "FLAIR"))

    def test_channel_map(self):
        values = ChannelMap(offset=0.1, scale=2.0, gamma=2.0).apply(np.array([0.0, 0.5, 2.0]), vmax=1.0)
        assert values.tolist() == pytest.approx([0.1, 0.6, 2.1])

    def test_inverted_channel_map(self):
        values = ChannelMap(offset=1.3, scale=-1.2, gamma=2.0).apply(np.array([0.0, 0.5, 1.0]), vmax=1.0)
        assert values.tolist() == pytest.approx([1.3, 1.0, 0.1])

    @pytest.mark.parametrize("scale", [0.0, float("nan")])
    def test_channel_map_rejects_degenerate_scale(self, scale: float):
        with pytest.raises(ValidationError):
            _ = ChannelMap(scale=scale)


class TestCohort:
    """Tests for cohorts and synthetic scores."""

    def test_cohort(self):
        cohort = CohortSpec(
            base=BASE,
            entries=[
                CohortEntry(lesion_fraction=0.05, stage=1, count=2, group="ID"),
                CohortEntry(lesion_fraction=0.8, stage=4),
            ],
        )
        results = generate_cohort(cohort)
        assert [r.study.subject_id for r in results] == ["P001", "P002", "P003"]
        assert [r.study.stage for r in results] == [1, 1, 4]
        assert not np.array_equal(results[0].lesion.data, results[1].lesion.data)

    def test_misaligned_cohort(self):
        cohort = CohortSpec(base=BASE, entries=[CohortEntry(lesion_fraction=0.1, stage=2)], misalign=True)
        (result,) = generate_cohort(cohort)
        assert set(result.transforms) == {"T1", "T2", "DWI"}
        for transform in result.transforms.values():
            assert max(abs(a) for a in transform.rotation) <= MISALIGN_ROTATION
            assert max(abs(t) for t in transform.translation) <= MISALIGN_TRANSLATION

    def test_write_cohort(self, tmp_path: Path):
        cohort = CohortSpec(
            base=BASE,
            entries=[CohortEntry(lesion_fraction=0.05, stage=1, group="ID"), CohortEntry(lesion_fraction=0.6, stage=4)],
        )
        results = generate_cohort(cohort)
        manifest = write_cohort(results, tmp_path / "cohort")
        studies = load_manifest(manifest)
        assert [(s.subject_id, s.stage, s.group) for s in studies] == [("P001", 1, "ID"), ("P002", 4, None)]
        assert studies[1].mask is not None
        assert studies[1].mask.count == results[1].study.mask.count
        truth = load_json(tmp_path / "cohort" / "ground_truth.json")
        assert truth["P002"]["lesion_fraction"] == pytest.approx(results[1].lesion_fraction)
        assert (tmp_path / "cohort" / "P002" / "lesion.nii").exists()

    def test_synthetic_scores(self):
        samples = synthetic_scores((3, 4, 5, 6), (0.1, 0.3, 0.5, 0.8), 0.2, seed=1)
        assert [sum(1 for s in samples if s.stage == st) for st in (1, 2, 3, 4)] == [3, 4, 5, 6]
        assert all(0.0 <= s.s <= 1.0 for s in samples)
        assert samples == synthetic_scores((3, 4, 5, 6), (0.1, 0.3, 0.5, 0.8), 0.2, seed=1)

    def test_synthetic_scores_must_increase(self):
        with pytest.raises(PhantomError):
            _ = synthetic_scores((1, 1, 1, 1), (0.1, 0.5, 0.4, 0.8), 0.1, seed=0)
