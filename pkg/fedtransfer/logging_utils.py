"""Logger factory shared by library components and the CLI."""

import logging
from typing import Union

from .errors import InvalidArgumentError

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
ROOT_LOGGER = "fedtransfer"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _setup_root_logger() -> logging.Logger:
    """Create the package root logger if none is configured."""
    root = logging.getLogger(ROOT_LOGGER)
    if not root.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
        root.setLevel(logging.INFO)
    return root


def get_logger(name: str) -> logging.Logger:
    """Return a named logger under the ``fedtransfer`` root.

    Args:
        name: Logger name, usually ``__name__`` of the calling module.

    Returns:
        ``logging.Logger`` that propagates to the configured package root.
    """
    _setup_root_logger()
    return logging.getLogger(name)


def configure_logging(level: Union[int, str] = "INFO") -> logging.Logger:
    """Set the level of the package root logger.

    Args:
        level: Level name (one of ``LOG_LEVELS``, case-insensitive) or numeric level.

    Returns:
        The ``fedtransfer`` root logger.

    Raises:
        InvalidArgumentError: If ``level`` is not a known level name.
    """
    if isinstance(level, str):
        name = level.upper()
        if name not in LOG_LEVELS:
            raise InvalidArgumentError(
                f"unknown log level '{level}', expected one of {', '.join(LOG_LEVELS)}"
            )
        level = getattr(logging, name)
    root = _setup_root_logger()
    root.setLevel(level)
    return root
