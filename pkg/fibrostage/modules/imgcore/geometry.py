"""Coordinate helpers for axis-aligned grids."""

from typing import Any

from fibrostage.modules.imgcore.schemas import Geometry, Mask, Volume

Triple = tuple[float, float, float]


def world_to_voxel(image: Volume | Mask | Geometry, point: Any) -> Triple:
    """Continuous voxel index of a physical point: (point - origin) / spacing."""
    geometry = image if isinstance(image, Geometry) else image.geometry
    return geometry.world_to_voxel(point)


def voxel_to_world(image: Volume | Mask | Geometry, index: Any) -> Triple:
    """Physical position of a continuous voxel index: origin + index * spacing."""
    geometry = image if isinstance(image, Geometry) else image.geometry
    return geometry.voxel_to_world(index)
