"""
Timing utilities.
"""
import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator

logger = logging.getLogger(__name__)


@dataclass
class Elapsed:
    ms: float = 0.0


@contextmanager
def timed(label: str) -> Iterator[Elapsed]:
    """Context manager to measure execution time; the yielded value is filled on exit."""
    elapsed = Elapsed()
    start = time.perf_counter()
    try:
        yield elapsed
    finally:
        elapsed.ms = (time.perf_counter() - start) * 1000
        logger.debug(f"[TIMER] {label}: {elapsed.ms:.2f} ms")
