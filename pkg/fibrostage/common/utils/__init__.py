from fibrostage.common.utils.parallel import ordered_map
from fibrostage.common.utils.utils import (
    dump_json,
    get_project_metadata,
    load_json,
    load_toml,
)

__all__ = [
    "dump_json",
    "get_project_metadata",
    "load_json",
    "load_toml",
    "ordered_map",
]
