"""structlog setup shared by every entry point."""

from __future__ import annotations

import logging
import sys

import structlog

from src.config import LoggingConfig


def _stderr_logger(*_args: object) -> structlog.PrintLogger:
    # resolved per logger so a swapped sys.stderr (test runners) is honoured
    return structlog.PrintLogger(sys.stderr)


def configure_logging(config: LoggingConfig) -> None:
    """Install the processor chain; output goes to stderr so stdout stays parseable."""
    renderer = (
        structlog.processors.JSONRenderer()
        if config.log_format == "json"
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    level = logging.getLevelName(config.log_level.upper())
    if not isinstance(level, int):
        level = logging.WARNING

    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(level),
        logger_factory=_stderr_logger,
        cache_logger_on_first_use=False,
    )
