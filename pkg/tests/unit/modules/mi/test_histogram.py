"""Tests for hard and soft joint histograms."""

import numpy as np
import pytest
from pydantic import ValidationError

from fibrostage.core.errors import HistogramError
from fibrostage.modules.mi import (
    HistogramConfig,
    JointHistogram,
    bspline3,
    bspline3_cdf,
    hard_joint_histogram,
    soft_bin_weights,
    soft_joint_histogram,
)

UNIT = HistogramConfig(bins=2, intensity_range=((0.0, 1.0), (0.0, 1.0)))


class TestKernel:
    """Tests for the cubic B-spline kernel."""

    def test_unit_mass(self):
        x = np.linspace(-2.5, 2.5, 50001)
        assert np.trapezoid(bspline3(x), x) == pytest.approx(1.0, abs=1e-6)

    def test_cdf_matches_integral(self):
        x = np.linspace(-2.5, 2.5, 50001)
        numeric = np.cumsum(bspline3(x)) * (x[1] - x[0])
        assert np.allclose(bspline3_cdf(x)[::5000], numeric[::5000], atol=1e-3)
        assert bspline3_cdf(np.array([-3.0, 0.0, 3.0])).tolist() == [0.0, 0.5, 1.0]

    def test_weights_sum_to_one(self, rng):
        u = rng.uniform(-1.0, 9.0, size=200)
        weights, derivative = soft_bin_weights(u, 8, 1.0, with_derivative=True)
        assert np.allclose(weights.sum(axis=1), 1.0, atol=1e-12)
        assert derivative is not None
        assert np.allclose(derivative.sum(axis=1), 0.0, atol=1e-12)

    def test_derivative_matches_finite_difference(self, rng):
        u = rng.uniform(0.5, 7.5, size=30)
        h = 1e-6
        _, derivative = soft_bin_weights(u, 8, 1.0, with_derivative=True)
        plus, _ = soft_bin_weights(u + h, 8, 1.0)
        minus, _ = soft_bin_weights(u - h, 8, 1.0)
        assert np.allclose(derivative, (plus - minus) / (2 * h), atol=1e-6)


class TestHardJointHistogram:
    """Tests for hard_joint_histogram."""

    def test_constant_pair(self):
        cfg = HistogramConfig(bins=4, intensity_range=((0.0, 4.0), (0.0, 4.0)))
        h = hard_joint_histogram(np.full(10, 2.5), np.full(10, 2.5), cfg)
        assert h.joint[2, 2] == 1.0
        assert h.joint.sum() == 1.0

    def test_independent_counts(self):
        h = hard_joint_histogram(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1]), UNIT)
        assert h.joint.tolist() == [[0.25, 0.25], [0.25, 0.25]]

    def test_diagonal_counts(self):
        h = hard_joint_histogram(np.array([0, 0, 1, 1]), np.array([0, 0, 1, 1]), UNIT)
        assert h.joint.tolist() == [[0.5, 0.0], [0.0, 0.5]]
        assert h.marginal_x.tolist() == [0.5, 0.5]

    def test_out_of_range_clamped(self):
        h = hard_joint_histogram(np.array([-5.0, 7.0]), np.array([0.2, 0.7]), UNIT)
        assert h.joint.tolist() == [[0.5, 0.0], [0.0, 0.5]]

    def test_length_mismatch(self):
        with pytest.raises(HistogramError):
            _ = hard_joint_histogram(np.zeros(3), np.zeros(4), UNIT)

    def test_empty(self):
        with pytest.raises(HistogramError):
            _ = hard_joint_histogram(np.zeros(0), np.zeros(0), UNIT)

    def test_data_range_without_explicit_range(self):
        h = hard_joint_histogram(np.array([10.0, 20.0]), np.array([1.0, 1.0]), HistogramConfig(bins=2))
        assert h.marginal_x.tolist() == [0.5, 0.5]
        assert h.marginal_y.tolist() == [0.0, 1.0]


class TestSoftJointHistogram:
    """Tests for soft_joint_histogram."""

    def test_narrow_kernel_matches_hard(self, rng):
        cfg = HistogramConfig(bins=8, intensity_range=((0.0, 8.0), (0.0, 8.0)), kernel_width=1e-3)
        x = rng.integers(0, 8, size=500) + 0.5 + rng.uniform(-0.3, 0.3, size=500)
        y = rng.integers(0, 8, size=500) + 0.5 + rng.uniform(-0.3, 0.3, size=500)
        soft = soft_joint_histogram(x, y, cfg)
        hard = hard_joint_histogram(x, y, cfg)
        assert np.allclose(soft.joint, hard.joint, atol=1e-6)

    def test_constant_pair_is_symmetric(self):
        cfg = HistogramConfig(bins=8, intensity_range=((0.0, 8.0), (0.0, 8.0)))
        h = soft_joint_histogram(np.full(5, 3.5), np.full(5, 3.5), cfg)
        assert np.allclose(h.marginal_x, h.marginal_y)
        assert int(np.argmax(h.marginal_x)) == 3
        for k in (1, 2):
            assert h.marginal_x[3 - k] == pytest.approx(h.marginal_x[3 + k], abs=1e-12)
        assert np.allclose(h.joint, h.joint.T)

    def test_random_patch_normalized(self, rng):
        cfg = HistogramConfig(bins=32)
        h = soft_joint_histogram(rng.normal(size=16**3), rng.normal(size=16**3), cfg)
        assert abs(h.joint.sum() - 1.0) <= 1e-9
        assert np.all(h.joint >= 0)


class TestJointHistogram:
    """Tests for the JointHistogram model."""

    def test_must_sum_to_one(self):
        with pytest.raises(ValidationError):
            _ = JointHistogram.from_joint([[0.5, 0.0], [0.0, 0.4]])

    def test_marginals_checked(self):
        with pytest.raises(ValidationError):
            _ = JointHistogram(joint=[[0.5, 0.0], [0.0, 0.5]], marginal_x=[0.4, 0.6], marginal_y=[0.5, 0.5])

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            _ = JointHistogram.from_joint([[1.5, -0.5], [0.0, 0.0]])

    def test_transposed(self):
        h = JointHistogram.from_joint([[0.1, 0.2], [0.3, 0.4]])
        t = h.transposed()
        assert t.joint.tolist() == [[0.1, 0.3], [0.2, 0.4]]
        assert np.array_equal(t.marginal_x, h.marginal_y)


class TestHistogramConfig:
    """Tests for HistogramConfig validation."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"bins": 1},
            {"epsilon": 0.0},
            {"kernel_width": -1.0},
            {"intensity_range": ((1.0, 1.0), (0.0, 1.0))},
            {"percentiles": (60.0, 40.0)},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            _ = HistogramConfig(**kwargs)

    def test_swapped(self):
        cfg = HistogramConfig(intensity_range=((0.0, 1.0), (5.0, 9.0)))
        assert cfg.swapped().intensity_range == ((5.0, 9.0), (0.0, 1.0))
