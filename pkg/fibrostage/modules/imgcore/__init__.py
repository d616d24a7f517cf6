from fibrostage.modules.imgcore.geometry import voxel_to_world, world_to_voxel
from fibrostage.modules.imgcore.io import load_mask, load_volume, save_mask, save_volume
from fibrostage.modules.imgcore.manifest import (
    ManifestRecord,
    load_manifest,
    load_study,
    read_manifest_records,
    write_manifest,
)
from fibrostage.modules.imgcore.schemas import ContrastMode, Geometry, Mask, Study, Volume

__all__ = [
    "ContrastMode",
    "Geometry",
    "ManifestRecord",
    "Mask",
    "Study",
    "Volume",
    "load_manifest",
    "load_mask",
    "load_study",
    "load_volume",
    "read_manifest_records",
    "save_mask",
    "save_volume",
    "voxel_to_world",
    "world_to_voxel",
    "write_manifest",
]
