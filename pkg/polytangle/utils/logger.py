"""Logging for polytangle.

Every module logs through ``get_logger(__name__)``; records propagate to the
``polytangle`` project logger, which ``setup_logger`` wires to stderr and,
when enabled, to a rotating file. stdout carries command reports only.

Levels follow the work being done:
- DEBUG: one line per inductive step, push or move
- INFO: one summary line per operation
- WARNING: recorded discrepancies (untouched columns, shear retries)
- ERROR: failed verifications
"""

import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Any, Optional

PROJECT_LOGGER = "polytangle"

LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

LEVEL_NAMES = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

_ANSI_RESET = "\033[0m"
_ANSI_BY_LEVEL = {
    logging.DEBUG: "\033[36m",
    logging.INFO: "\033[32m",
    logging.WARNING: "\033[33m",
    logging.ERROR: "\033[31m",
    logging.CRITICAL: "\033[35m",
}


class ColoredFormatter(logging.Formatter):
    """Colors the level name; the record is restored for other handlers."""

    def format(self, record: logging.LogRecord) -> str:
        plain = record.levelname
        record.levelname = f"{_ANSI_BY_LEVEL.get(record.levelno, _ANSI_RESET)}{plain}{_ANSI_RESET}"
        try:
            return super().format(record)
        finally:
            record.levelname = plain


class StderrHandler(logging.StreamHandler):
    """Stream handler bound to whatever ``sys.stderr`` is when a record is emitted.

    The CLI may run several times in one process with stderr redirected in
    between; binding at emit time keeps records going to the live stream.
    """

    def __init__(self) -> None:
        super().__init__(sys.stderr)

    def emit(self, record: logging.LogRecord) -> None:
        self.stream = sys.stderr
        super().emit(record)


def level_for(verbosity: int, explicit: Optional[str] = None, default: str = "WARNING") -> str:
    """Resolve the effective level from ``--log-level`` or the ``-v`` count.

    Examples:
        >>> level_for(0)
        'WARNING'

        >>> level_for(2)
        'DEBUG'

        >>> level_for(2, "error")
        'ERROR'
    """
    if explicit:
        return explicit.upper()
    if verbosity <= 0:
        return default.upper()
    return "INFO" if verbosity == 1 else "DEBUG"


def setup_logger(
    name: str = PROJECT_LOGGER,
    log_level: str = "WARNING",
    log_dir: str = "logs",
    log_file: str = "polytangle.log",
    max_bytes: int = 10_485_760,
    backup_count: int = 5,
    enable_console: bool = True,
    enable_file: bool = False,
) -> logging.Logger:
    """Attach the console and file sinks to a logger.

    A second call for the same logger only changes the level of the logger
    and its handlers, so a ``--log-level`` flag can be applied after import.

    Args:
        name: Logger to configure (the project logger by default)
        log_level: One of DEBUG, INFO, WARNING, ERROR, CRITICAL
        log_dir: Directory of the rotating log file
        log_file: File name inside ``log_dir``
        max_bytes: Rotation threshold
        backup_count: Rotated files kept
        enable_console: Log to stderr
        enable_file: Log to the rotating file

    Returns:
        The configured logger
    """
    level = getattr(logging, log_level.upper(), logging.WARNING)
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(level)
        return logger

    if enable_console:
        console = StderrHandler()
        formatter_class = ColoredFormatter if sys.stderr.isatty() else logging.Formatter
        console.setFormatter(formatter_class(LOG_FORMAT, datefmt=DATE_FORMAT))
        console.setLevel(level)
        logger.addHandler(console)

    if enable_file:
        directory = Path(log_dir)
        directory.mkdir(parents=True, exist_ok=True)
        rotating = RotatingFileHandler(directory / log_file, maxBytes=max_bytes,
                                       backupCount=backup_count, encoding="utf-8")
        rotating.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
        rotating.setLevel(level)
        logger.addHandler(rotating)

    logger.propagate = False
    return logger


def get_logger(name: str) -> logging.Logger:
    """Module logger; pass ``__name__`` so records reach the project logger."""
    return logging.getLogger(name)


def log_with_context(
    logger: logging.Logger,
    level: str,
    message: str,
    run_id: Optional[str] = None,
    **context: Any,
) -> None:
    """Log ``message`` followed by ``key=value`` fields.

    Batch verification passes one ``run_id`` per subset (``n3-J1.2``) so the
    records of concurrent workers can be told apart.

    Args:
        logger: Target logger
        level: Level name, any case
        message: Record text
        run_id: Correlation id, printed first when given
        **context: Extra fields, printed in call order
    """
    fields = ([f"run={run_id}"] if run_id else []) + [f"{key}={value}" for key, value in context.items()]
    text = f"{message} | {' '.join(fields)}" if fields else message
    logger.log(getattr(logging, level.upper(), logging.INFO), text)


if __name__ == "__main__":
    demo = setup_logger("polytangle.demo", log_level=level_for(2))
    demo.debug("step 1: case 2a at t=1")
    demo.info("certificate built")
    log_with_context(demo, "warning", "untouched columns adjoined", run_id="n3-J2", columns=[3])
