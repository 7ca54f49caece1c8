"""Utility functions and shared helpers for sievegaps."""

import logging
import math
import os
from fractions import Fraction
from typing import Iterable, Iterator, TypeVar

T = TypeVar("T")

PACKAGE_LOGGER = "sievegaps"
THREADS_ENV = "SIEVEGAPS_THREADS"
NO_PROGRESS_ENV = "SIEVEGAPS_NO_PROGRESS"
MAX_DEFAULT_WORKERS = 8


def get_logger(name: str) -> logging.Logger:
    """Return a configured logger with a standard format."""
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler()
        formatter = logging.Formatter("[%(levelname)s] %(name)s: %(message)s")
        handler.setFormatter(formatter)
        logger.addHandler(handler)
        logger.setLevel(logging.INFO)
    return logger


def set_log_level(level: int) -> None:
    """Apply a level to every sievegaps logger created so far."""
    for name, candidate in logging.Logger.manager.loggerDict.items():
        if name == PACKAGE_LOGGER or name.startswith(PACKAGE_LOGGER + "."):
            if isinstance(candidate, logging.Logger):
                candidate.setLevel(level)


def default_workers() -> int:
    """
    Worker count for block-parallel loops.

    Reads SIEVEGAPS_THREADS when set, otherwise min(8, cpu_count).

    Raises:
        ValueError: If the environment variable is not a positive integer
    """
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}")
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1, got {value}")
        return value
    return min(MAX_DEFAULT_WORKERS, os.cpu_count() or 1)


def progress(iterable: Iterable[T], desc: str, unit: str = "it", total: int | None = None,
             enabled: bool = True) -> Iterator[T] | Iterable[T]:
    """Wrap an iterable in a tqdm bar when tqdm is installed and progress is wanted."""
    if not enabled or os.environ.get(NO_PROGRESS_ENV) == "1":
        return iterable
    try:
        from tqdm import tqdm as tqdm_cls
    except ImportError:
        return iterable
    return tqdm_cls(iterable, desc=desc, unit=unit, total=total, leave=False)


def block_fsum(partials: Iterable[float]) -> float:
    """
    Reduce per-block partial sums in block order.

    Each partial is itself an fsum, so the total is correctly rounded and does
    not depend on how the range was cut into blocks or how many threads ran.
    """
    return math.fsum(partials)


def parse_int(text: str) -> int:
    """
    Parse an integer that may be written in scientific notation ("1e7").

    Raises:
        ValueError: If the text is not an exact integer
    """
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {text!r}")
    if value.denominator != 1:
        raise ValueError(f"not an integer: {text!r}")
    return int(value)
