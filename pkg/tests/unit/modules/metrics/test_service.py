"""Tests for segmentation and classification metrics."""

import numpy as np
import pytest

from fibrostage.core.errors import MetricError
from fibrostage.modules.imgcore import Geometry, Mask
from fibrostage.modules.metrics import accuracy, auc, boundary, dice, hausdorff

GEO = Geometry(dims=(10, 10, 10), spacing=(2.0, 1.0, 1.5))


def _mask(data: np.ndarray, geometry: Geometry = GEO) -> Mask:
    return Mask(geometry=geometry, data=data)


def _box(lo: tuple[int, int, int], hi: tuple[int, int, int], geometry: Geometry = GEO) -> Mask:
    data = np.zeros(geometry.dims, dtype=np.uint8)
    data[lo[0] : hi[0], lo[1] : hi[1], lo[2] : hi[2]] = 1
    return _mask(data, geometry)


def _brute_force_hausdorff(a: Mask, b: Mask) -> float:
    spacing = np.asarray(a.spacing)
    pa = np.argwhere(boundary(a)) * spacing
    pb = np.argwhere(boundary(b)) * spacing
    d = np.sqrt(((pa[:, None, :] - pb[None, :, :]) ** 2).sum(axis=-1))
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


class TestDice:
    """Tests for dice."""

    def test_identical(self):
        mask = _box((2, 2, 2), (6, 6, 6))
        assert dice(mask, mask) == 1.0

    def test_disjoint(self):
        assert dice(_box((0, 0, 0), (2, 2, 2)), _box((5, 5, 5), (7, 7, 7))) == 0.0

    def test_half_overlap(self):
        a = _box((0, 0, 0), (4, 1, 1))
        b = _box((2, 0, 0), (6, 1, 1))
        assert dice(a, b) == 0.5
        assert dice(b, a) == 0.5

    def test_both_empty(self):
        empty = _mask(np.zeros(GEO.dims))
        assert dice(empty, empty) == 1.0

    def test_grid_mismatch(self):
        other = Geometry(dims=(10, 10, 10))
        with pytest.raises(MetricError):
            _ = dice(_box((0, 0, 0), (2, 2, 2)), _box((0, 0, 0), (2, 2, 2), other))


class TestHausdorff:
    """Tests for hausdorff."""

    def test_identical(self):
        mask = _box((2, 2, 2), (6, 6, 6))
        assert hausdorff(mask, mask) == 0.0

    def test_single_voxels(self):
        geometry = Geometry(dims=(8, 4, 4), spacing=(2.0, 1.0, 1.0))
        a = _box((1, 1, 1), (2, 2, 2), geometry)
        b = _box((4, 1, 1), (5, 2, 2), geometry)
        assert hausdorff(a, b) == pytest.approx(6.0)

    def test_boundary_excludes_interior(self):
        edge = boundary(_box((1, 1, 1), (6, 6, 6)))
        assert edge.sum() == 5**3 - 3**3
        assert not edge[3, 3, 3]

    def test_boundary_touches_grid_edge(self):
        assert boundary(_mask(np.ones(GEO.dims))).sum() == 10**3 - 8**3

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_brute_force(self, seed: int):
        rng = np.random.default_rng(seed)
        a = _mask(rng.random(GEO.dims) > 0.7)
        b = _mask(rng.random(GEO.dims) > 0.8)
        assert hausdorff(a, b) == pytest.approx(_brute_force_hausdorff(a, b), rel=1e-12)
        assert hausdorff(a, b) == hausdorff(b, a)

    def test_empty_mask(self):
        with pytest.raises(MetricError):
            _ = hausdorff(_box((0, 0, 0), (2, 2, 2)), _mask(np.zeros(GEO.dims)))


class TestAuc:
    """Tests for auc."""

    def test_perfect(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [False, False, True, True]) == 1.0

    def test_all_ties(self):
        assert auc([0.5] * 6, [True, False] * 3) == 0.5

    def test_pair_count(self):
        assert auc([0.8, 0.6, 0.7, 0.1], [True, True, False, False]) == 0.75

    def test_monotone_invariance_and_flip(self, rng):
        scores = rng.random(40)
        labels = rng.random(40) > 0.5
        value = auc(scores.tolist(), labels.tolist())
        assert auc(np.exp(3 * scores).tolist(), labels.tolist()) == pytest.approx(value)
        assert auc(scores.tolist(), (~labels).tolist()) == pytest.approx(1.0 - value)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_pair_counting(self, seed: int):
        rng = np.random.default_rng(seed)
        scores = rng.integers(0, 6, size=30) / 5.0
        labels = np.arange(30) % 3 == 0
        pos, neg = scores[labels], scores[~labels]
        wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
        assert auc(scores.tolist(), labels.tolist()) == pytest.approx(wins / (pos.size * neg.size), rel=1e-12)

    def test_single_class(self):
        with pytest.raises(MetricError):
            _ = auc([0.1, 0.9], [True, True])

    def test_length_mismatch(self):
        with pytest.raises(MetricError):
            _ = auc([0.1, 0.9], [True])


class TestAccuracy:
    """Tests for accuracy."""

    def test_values(self):
        assert accuracy([True, False], [True, False]) == 1.0
        assert accuracy([True, False], [False, True]) == 0.0
        assert accuracy([True, True, False, False], [True, True, False, True]) == 0.75

    def test_empty(self):
        with pytest.raises(MetricError):
            _ = accuracy([], [])
