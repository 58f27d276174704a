"""Logging configuration for the toolkit."""

import logging
import sys
from typing import Any, Optional

import structlog

from .config import get_settings

settings = get_settings()


def setup_logging(level: Optional[str] = None, log_format: Optional[str] = None) -> None:
    """Configure structured logging for the toolkit."""
    level = (level or settings.log_level).upper()
    log_format = log_format or settings.log_format

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer() if log_format == "json"
            else structlog.dev.ConsoleRenderer()
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    # Reports go to files; the log stream goes to stderr
    logging.basicConfig(
        format="%(message)s",
        stream=sys.stderr,
        level=getattr(logging, level, logging.INFO)
    )


def get_logger(name: str) -> structlog.BoundLogger:
    """Get a structured logger instance."""
    return structlog.get_logger(name)


class CheckLogger:
    """Logger for verification checks with context."""

    def __init__(self, logger: structlog.BoundLogger):
        self.logger = logger

    def log_started(self, check: str, **kwargs: Any) -> None:
        """Log the start of a check."""
        self.logger.info(
            "Check started",
            check=check,
            **kwargs
        )

    def log_result(self, check: str, passed: bool, residual: Any, **kwargs: Any) -> None:
        """Log the outcome of a check."""
        log = self.logger.info if passed else self.logger.warning
        log(
            "Check finished",
            check=check,
            passed=passed,
            residual=residual,
            **kwargs
        )
