"""Resampling of volumes and masks through rigid transforms, and pyramid downsampling."""

import numpy as np
from scipy import ndimage

from fibrostage.modules.imgcore.schemas import Geometry, Mask, Volume
from fibrostage.modules.reg.constants import FILL_VALUE
from fibrostage.modules.reg.schemas import RigidTransform


def _geometry(target: Geometry | Volume | Mask) -> Geometry:
    return target if isinstance(target, Geometry) else target.geometry


def world_grid(geometry: Geometry) -> np.ndarray:
    """Physical position of every voxel of ``geometry``, shape (3, *dims)."""
    idx = np.indices(geometry.dims, dtype=np.float64)
    spacing = np.asarray(geometry.spacing, dtype=np.float64)[:, None, None, None]
    return idx * spacing + np.asarray(geometry.origin, dtype=np.float64)[:, None, None, None]


def moving_coordinates(source: Geometry, t: RigidTransform, target: Geometry) -> np.ndarray:
    """Continuous ``source`` voxel index of every ``target`` voxel after mapping through ``t``.

    The affine part is evaluated in index space so that identity and whole-voxel shifts land
    exactly on integer indices.

    Returns:
        Array of shape (3, *target.dims).
    """
    st = np.asarray(target.spacing, dtype=np.float64)
    sm = np.asarray(source.spacing, dtype=np.float64)
    offset = (np.asarray(target.origin, dtype=np.float64) - np.asarray(source.origin, dtype=np.float64)) / sm
    scale = st / sm

    idx = np.indices(target.dims, dtype=np.float64)
    coords = idx * scale[:, None, None, None] + offset[:, None, None, None]

    if not t.is_identity:
        rel = world_grid(target) - np.asarray(t.center)[:, None, None, None]
        delta = np.einsum("ij,j...->i...", t.matrix() - np.eye(3), rel)
        delta += np.asarray(t.translation)[:, None, None, None]
        coords += delta / sm[:, None, None, None]
    return coords


def forward_differences(data: np.ndarray) -> np.ndarray:
    """``data[i + 1] - data[i]`` along each axis, zero on the last slice; shape (3, *data.shape)."""
    arr = np.asarray(data, dtype=np.float64)
    return np.stack([np.diff(arr, axis=axis, append=np.take(arr, [-1], axis=axis)) for axis in range(3)])


def linear_derivatives(differences: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Partial derivatives of the trilinear interpolant at ``coords`` along each index axis.

    Along axis ``k`` the interpolant is linear between ``floor(c_k)`` and ``floor(c_k) + 1``,
    so its slope is the forward difference at the floor, interpolated over the other axes.

    Args:
        differences: Output of :func:`forward_differences` for the sampled array.
        coords: Continuous indices, shape (3, ...).

    Returns:
        Array shaped like ``coords``; zero outside the array.
    """
    out = np.empty_like(coords, dtype=np.float64)
    for axis in range(3):
        at = coords.copy()
        at[axis] = np.floor(coords[axis])
        out[axis] = ndimage.map_coordinates(
            differences[axis], at, output=np.float64, order=1, mode="constant", cval=0.0
        )
    return out


def sample_linear(moving: Volume, t: RigidTransform, target: Geometry) -> np.ndarray:
    """Trilinear samples of ``moving`` on ``target`` as a float64 array; outside is 0."""
    coords = moving_coordinates(moving.geometry, t, target)
    return ndimage.map_coordinates(
        moving.data.astype(np.float64),
        coords,
        output=np.float64,
        order=1,
        mode="constant",
        cval=FILL_VALUE,
    )


def resample_linear(moving: Volume, t: RigidTransform, target: Geometry | Volume | Mask) -> Volume:
    """Sample ``moving`` at ``t(world(v))`` for every voxel ``v`` of the target grid.

    Args:
        moving: Volume to resample.
        t: Transform from target (fixed) space to moving space.
        target: Output grid.

    Returns:
        Volume on the target grid; samples outside ``moving`` are 0.
    """
    geometry = _geometry(target)
    return Volume(geometry=geometry, data=sample_linear(moving, t, geometry))


def resample_nearest(mask: Mask, t: RigidTransform, target: Geometry | Volume | Mask) -> Mask:
    """Nearest-neighbour variant of :func:`resample_linear` for binary masks."""
    geometry = _geometry(target)
    coords = moving_coordinates(mask.geometry, t, geometry)
    data = ndimage.map_coordinates(mask.data, coords, order=0, mode="constant", cval=0)
    return Mask(geometry=geometry, data=data)


def _pooled_geometry(geometry: Geometry, factors: tuple[int, int, int]) -> Geometry:
    spacing = np.asarray(geometry.spacing) * np.asarray(factors)
    # block centers
    origin = np.asarray(geometry.origin) + (np.asarray(factors) - 1) / 2.0 * np.asarray(geometry.spacing)
    dims = tuple(d // f for d, f in zip(geometry.dims, factors, strict=True))
    return Geometry(
        dims=(dims[0], dims[1], dims[2]),
        spacing=(float(spacing[0]), float(spacing[1]), float(spacing[2])),
        origin=(float(origin[0]), float(origin[1]), float(origin[2])),
    )


def _mean_pool(data: np.ndarray, factors: tuple[int, int, int]) -> np.ndarray:
    fx, fy, fz = factors
    nx, ny, nz = (d // f for d, f in zip(data.shape, factors, strict=True))
    block = data[: nx * fx, : ny * fy, : nz * fz].astype(np.float64)
    return block.reshape(nx, fx, ny, fy, nz, fz).mean(axis=(1, 3, 5))


def _factors(dims: tuple[int, int, int], factor: int) -> tuple[int, int, int]:
    return (min(factor, dims[0]), min(factor, dims[1]), min(factor, dims[2]))


def downsample_volume(volume: Volume, factor: int) -> Volume:
    """Mean-pool ``factor``-sized blocks; axes shorter than ``factor`` collapse to one voxel."""
    if factor == 1:
        return volume
    factors = _factors(volume.dims, factor)
    return Volume(geometry=_pooled_geometry(volume.geometry, factors), data=_mean_pool(volume.data, factors))


def downsample_mask(mask: Mask, factor: int) -> Mask:
    """Mean-pool a mask and keep blocks that are at least half organ."""
    if factor == 1:
        return mask
    factors = _factors(mask.dims, factor)
    pooled = _mean_pool(mask.data, factors) >= 0.5
    return Mask(geometry=_pooled_geometry(mask.geometry, factors), data=pooled)
