"""Module loggers under the ``fibrostage`` namespace."""

import logging

ROOT_LOGGER = "fibrostage"


def get_logger(module_name: str | None = None) -> logging.Logger:
    """Logger ``fibrostage.<module_name>``, or the package root logger.

    Loggers carry no handlers of their own; records propagate to the root logger, whose
    handlers (installed by ``setup_logging``) stamp each record with the subject set by
    ``subject_context``. Code running per subject, possibly on a worker thread, therefore
    logs through the plain module logger and still gets the subject tag.

    Args:
        module_name: Dotted path below the package, e.g. ``"modules.reg.service"``.
    """
    if module_name:
        return logging.getLogger(f"{ROOT_LOGGER}.{module_name}")
    return logging.getLogger(ROOT_LOGGER)
