"""Structured logging configuration for the steam command line."""

from __future__ import annotations

import logging

from .config import get_settings

logger = logging.getLogger("steam.server")


def configure_logging() -> None:
    """Configure logging with structured format and the configured log level."""
    if logger.handlers:
        return

    log_level = get_settings().log_level.upper()
    numeric_level = getattr(logging, log_level, logging.INFO)

    logging.basicConfig(
        level=numeric_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    logging.getLogger("steam").setLevel(numeric_level)
