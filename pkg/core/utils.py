"""
Utility functions for the realizability toolkit
Logging, number helpers, fraction parsing and atomic output
"""

import os
import sys
import math
import time
import logging
import tempfile
from fractions import Fraction
from functools import wraps
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Callable, Union

from core.errors import ParseError, PreconditionError


def setup_logging(settings) -> logging.Logger:
    """
    Setup logging with rotation and console output

    Console output goes to stderr: stdout is reserved for CSV/JSON data.

    Args:
        settings: Settings object with logging configuration

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger('Nielsen')
    logger.setLevel(getattr(logging, settings.LOG_LEVEL.upper()))

    # Remove existing handlers
    logger.handlers = []
    logger.propagate = False

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, settings.LOG_LEVEL.upper()))
    console_format = logging.Formatter(
        '%(asctime)s | %(levelname)-8s | %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )
    console_handler.setFormatter(console_format)
    logger.addHandler(console_handler)

    # File handler with rotation
    if settings.LOG_TO_FILE:
        settings.LOGS_DIR.mkdir(parents=True, exist_ok=True)
        log_file = settings.LOGS_DIR / 'nielsen.log'
        file_handler = TimedRotatingFileHandler(
            filename=log_file,
            when='midnight',
            interval=1,
            backupCount=settings.LOG_BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_format = logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)s | %(funcName)s:%(lineno)d | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        file_handler.setFormatter(file_format)
        logger.addHandler(file_handler)

    return logger


def log_duration(label: str):
    """
    Decorator logging wall time of a computation at DEBUG level

    Args:
        label: Name used in the log line
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            result = func(*args, **kwargs)
            logging.getLogger('Nielsen').debug(
                f"{label} finished in {time.perf_counter() - start:.3f}s"
            )
            return result
        return wrapper
    return decorator


def parse_fraction(text: Union[str, int, Fraction]) -> Fraction:
    """
    Parse '1', '1/2' or '0.5' into an exact Fraction

    Args:
        text: Textual or numeric value

    Returns:
        Exact rational value
    """
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"Cannot parse rational value '{text}': {e}") from e


def format_fraction(value: Fraction) -> str:
    """Render p/q, or p when q == 1"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def v2(k: int) -> int:
    """2-adic valuation of a positive integer"""
    if k <= 0:
        raise PreconditionError(f"v2 needs a positive integer, got {k}")
    return (k & -k).bit_length() - 1


def ceil_log2(n: int) -> int:
    """Exact ceil(log2 n) for n >= 1"""
    if n < 1:
        raise PreconditionError(f"ceil_log2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


def log_function(base: str) -> Callable[[float], float]:
    """Logarithm for the configured base name ('e', '2', '10')"""
    if base == "e":
        return math.log
    if base == "2":
        return math.log2
    if base == "10":
        return math.log10
    raise PreconditionError(f"Unsupported log base {base}")


def log2_int(x: int) -> float:
    """log2 of a (possibly huge) positive integer without float overflow"""
    if x <= 0:
        raise PreconditionError("log2 of a non-positive integer")
    shift = max(0, x.bit_length() - 64)
    return math.log2(x >> shift) + shift


def atomic_write(path: Union[str, Path], text: str) -> Path:
    """
    Write text to path through a temporary sibling and rename

    A failure before the rename leaves no partial output file behind.

    Args:
        path: Destination path
        text: Full file content

    Returns:
        Destination path
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as fh:
            fh.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return path
