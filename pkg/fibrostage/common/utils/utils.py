import json
from pathlib import Path
from typing import Any

import tomli

from fibrostage.core.logger.logger import get_logger

# Initialize module logger
logger = get_logger("common.utils")


def load_json(filename: str | Path) -> Any:
    with Path(filename).open(encoding="utf-8") as f:
        return json.load(f)


def dump_json(data: Any, filename: str | Path) -> None:
    """Write ``data`` as indented UTF-8 JSON, creating parent directories.

    Floats are written with Python's shortest round-trip representation (at most 17
    significant digits), so reading the file back reproduces every value bit-exactly.
    """
    path = Path(filename)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, allow_nan=False)
        f.write("\n")


def load_toml(filename: str | Path) -> dict[str, Any]:
    """Load and parse a TOML file.

    Args:
        filename: Path to the TOML file to load

    Returns:
        Parsed TOML data as a dictionary

    Raises:
        FileNotFoundError: If the file doesn't exist
        tomli.TOMLDecodeError: If the file contains invalid TOML
    """
    try:
        with Path(filename).open("rb") as f:
            logger.debug("Loading TOML file: %s", filename)
            return tomli.load(f)
    except FileNotFoundError:
        logger.exception("TOML file not found: %s", filename)
        raise
    except tomli.TOMLDecodeError:
        logger.exception("Invalid TOML format in %s", filename)
        raise


def get_project_metadata(pyproject: str | Path = "pyproject.toml") -> tuple[str, str, str]:
    """Get project metadata from pyproject.toml.

    Returns:
        tuple containing name, version, and description
    """
    fallback = ("fibrostage", "0.1.0", "Liver MRI registration and fibrosis staging toolkit")
    if not Path(pyproject).is_file():
        return fallback
    try:
        pyproject_data = load_toml(pyproject)
        poetry_data = pyproject_data["tool"]["poetry"]
        return (
            poetry_data["name"],
            poetry_data["version"],
            poetry_data["description"],
        )
    except (KeyError, tomli.TOMLDecodeError):
        logger.debug("pyproject.toml unusable, using built-in metadata")
        return fallback
