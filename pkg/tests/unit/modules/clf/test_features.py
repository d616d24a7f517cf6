"""Tests for handcrafted patch features."""

import numpy as np
import pytest

from fibrostage.modules.clf import feature_matrix, feature_names, featurize
from fibrostage.modules.clf.constants import FEATURES_PER_CHANNEL, HISTOGRAM_BINS
from fibrostage.modules.patches import Patch


def _patch(data: np.ndarray, support: np.ndarray | None = None, coverage: float = 1.0) -> Patch:
    k, s, _ = data.shape
    return Patch(
        subject_id="S",
        slice_index=0,
        grid_xy=(0, 0),
        data=data,
        support=np.ones((s, s)) if support is None else support,
        coverage=coverage,
        channels=("T1", "T2", "DWI")[:k],
    )


class TestFeaturize:
    """Tests for featurize."""

    def test_dimension_and_names(self, rng):
        features = featurize(_patch(rng.normal(size=(3, 16, 16)), coverage=0.75))
        assert features.values.shape == (3 * FEATURES_PER_CHANNEL + 1,)
        assert FEATURES_PER_CHANNEL == 13
        assert features.names[0] == "T1_mean"
        assert features.names[-1] == "coverage"
        assert features.values[-1] == 0.75

    def test_constant_patch(self):
        values = featurize(_patch(np.full((1, 16, 16), 0.5))).values
        assert values[0] == pytest.approx(0.5)
        assert values[1] == pytest.approx(0.0)
        assert values[2] == pytest.approx(0.5)
        histogram = values[3 : 3 + HISTOGRAM_BINS]
        assert sorted(histogram.tolist())[-1] == 1.0
        assert np.count_nonzero(histogram) == 1
        assert values[3 + HISTOGRAM_BINS] == pytest.approx(0.0)

    def test_zero_channel(self, rng):
        data = rng.normal(size=(2, 16, 16))
        data[1] = 0.0
        values = featurize(_patch(data)).values
        assert not values[FEATURES_PER_CHANNEL : 2 * FEATURES_PER_CHANNEL].any()
        assert values[:FEATURES_PER_CHANNEL].any()

    def test_ramp_gradient(self):
        ramp = np.broadcast_to(0.25 * np.arange(16, dtype=np.float64)[None, :], (16, 16))
        values = featurize(_patch(ramp[None, :, :].copy())).values
        assert values[-3] == pytest.approx(0.25)
        assert values[-2] == pytest.approx(0.0, abs=1e-12)

    def test_gradient_ignores_mask_edge(self):
        support = np.zeros((16, 16), dtype=np.uint8)
        support[:, :8] = 1
        data = np.where(support, 1.0, 0.0)[None, :, :]
        values = featurize(_patch(data, support, coverage=0.5)).values
        assert values[-3] == pytest.approx(0.0)
        assert values[1] == pytest.approx(0.0)

    def test_feature_matrix(self, rng):
        patches = [_patch(rng.normal(size=(3, 8, 8))) for _ in range(4)]
        assert feature_matrix(patches).shape == (4, 3 * FEATURES_PER_CHANNEL + 1)
        assert feature_matrix([]).shape == (0, 0)
        assert len(feature_names(("A", "B"))) == 2 * FEATURES_PER_CHANNEL + 1
