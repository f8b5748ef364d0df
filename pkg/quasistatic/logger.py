"""
Logging for the quasistatic package: a rich console handler on stderr for the
package logger, and optional plain-text run logs.
"""
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional, Union

from rich.console import Console
from rich.logging import RichHandler

from .config import config

PACKAGE = "quasistatic"
FILE_FORMAT = "%(asctime)s %(levelname)-7s %(name)s %(filename)s:%(lineno)d  %(message)s"


def _resolve_level(level: Union[int, str, None]) -> int:
    if level is None:
        level = config.logging.level
    if isinstance(level, str):
        return getattr(logging, level.upper(), logging.INFO)
    return level


def setup_logger(name: str = PACKAGE, level: Union[int, str, None] = None) -> logging.Logger:
    """
    Install the rich console handler on a logger.

    Module loggers (``quasistatic.increment.solver`` and so on) propagate to
    the package logger, so configuring it once covers the whole package.
    Per-iteration solver records are logged at DEBUG.

    Args:
        name: Logger name
        level: Level name or number (defaults to LOG_LEVEL from the environment)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(_resolve_level(level))

    for handler in [h for h in logger.handlers if isinstance(h, RichHandler)]:
        logger.removeHandler(handler)

    console_handler = RichHandler(
        console=Console(stderr=True),
        show_time=False,
        show_path=False,
        rich_tracebacks=True,
        markup=False,
    )
    console_handler.setFormatter(logging.Formatter("%(name)s - %(message)s"))
    logger.addHandler(console_handler)
    return logger


def attach_run_log(directory: Optional[Path] = None, command: str = "run", name: str = PACKAGE) -> Path:
    """
    Send the records of one command to a timestamped file as well.

    A file handler left over from an earlier command is closed first.

    Args:
        directory: Where the log goes (defaults to the configured logs directory)
        command: Prefix of the file name
        name: Logger to attach to

    Returns:
        Path of the log file
    """
    directory = Path(directory) if directory is not None else config.logs_dir
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{command}_{datetime.now():%Y%m%d_%H%M%S}.log"

    logger = logging.getLogger(name)
    for handler in [h for h in logger.handlers if isinstance(h, logging.FileHandler)]:
        logger.removeHandler(handler)
        handler.close()

    file_handler = logging.FileHandler(path)
    file_handler.setFormatter(logging.Formatter(FILE_FORMAT))
    logger.addHandler(file_handler)
    return path


def get_logger(name: str) -> logging.Logger:
    """Logger for a module, usually ``get_logger(__name__)``."""
    return logging.getLogger(name)


logger = setup_logger()


def handle_exception(exc_type, exc_value, exc_traceback):
    """Route uncaught exceptions through the package logger."""
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc_value, exc_traceback)
        return
    logger.critical("Uncaught exception", exc_info=(exc_type, exc_value, exc_traceback))


sys.excepthook = handle_exception
