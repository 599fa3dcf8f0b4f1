"""Logging configuration module."""

from __future__ import annotations

import logging
from pathlib import Path

from app.config.settings import get_settings

LOG_FORMAT = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"


def configure_logging() -> None:
    """Configure root logger according to project conventions."""

    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format=LOG_FORMAT,
    )


def attach_run_log(path: Path) -> logging.Handler:
    """Mirror all ``app`` log records into a UTF-8 run log file.

    The caller owns the returned handler and must pass it to
    :func:`detach_run_log` once the run is over.
    """

    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger = logging.getLogger("app")
    logger.addHandler(handler)
    if logger.getEffectiveLevel() > logging.INFO:
        logger.setLevel(logging.INFO)
    return handler


def detach_run_log(handler: logging.Handler) -> None:
    logging.getLogger("app").removeHandler(handler)
    handler.close()
