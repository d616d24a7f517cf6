import logging
from pathlib import Path
from typing import TYPE_CHECKING

from .filters import SubjectContextFilter
from .logger import ROOT_LOGGER

if TYPE_CHECKING:
    from fibrostage.core.settings import LoggingConfig


def setup_logging(config: "LoggingConfig", output_dir: Path | None = None) -> None:
    """Configure logging for the toolkit.

    Args:
        config: Logging section of the run configuration (level, format, file, module levels)
        output_dir: Directory that receives the log file when ``config.file`` is set
    """
    subject_filter = SubjectContextFilter()
    formatter = logging.Formatter(config.format)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.addFilter(subject_filter)
    handlers: list[logging.Handler] = [console_handler]

    log_path: Path | None = None
    if config.file:
        log_dir = output_dir if output_dir is not None else Path("logs")
        log_dir.mkdir(parents=True, exist_ok=True)
        log_path = log_dir / config.file
        file_handler = logging.FileHandler(filename=log_path, encoding="utf-8")
        file_handler.setFormatter(formatter)
        file_handler.addFilter(subject_filter)
        handlers.append(file_handler)

    # force=True so repeated CLI invocations in one process (tests) reconfigure cleanly
    logging.basicConfig(level=config.level.upper(), handlers=handlers, force=True)

    for module, level in config.module_levels.items():
        logging.getLogger(module).setLevel(level.upper())

    logger = logging.getLogger(ROOT_LOGGER)
    logger.debug("Log level set to %s", config.level.upper())
    if log_path is not None:
        logger.debug("Log file: %s", log_path)
