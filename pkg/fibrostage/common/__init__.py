from fibrostage.common.utils import dump_json, get_project_metadata, load_json, ordered_map

__all__ = ["dump_json", "get_project_metadata", "load_json", "ordered_map"]
