"""
Bounded worker pool for per-scene work.
Results come back in input order regardless of completion order.
"""
import asyncio
import logging
import os
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

PARALLELISM_ENV = "GRASPKIT_PARALLELISM"


def default_parallelism() -> int:
    """Read GRASPKIT_PARALLELISM with fallback to 1."""
    value = os.getenv(PARALLELISM_ENV, "1")
    try:
        n = int(value)
    except ValueError:
        raise ValueError(f"{PARALLELISM_ENV} must be an integer") from None
    if n < 1:
        raise ValueError(f"{PARALLELISM_ENV} must be >= 1")
    return n


async def run_pool(fn: Callable[[T], R], items: Sequence[T], parallelism: int = 1) -> List[R]:
    """Run fn over items in threads, at most `parallelism` at a time."""
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")
    sem = asyncio.Semaphore(parallelism)

    async def _one(item: T) -> R:
        async with sem:
            return await asyncio.to_thread(fn, item)

    return list(await asyncio.gather(*(_one(i) for i in items)))


def map_parallel(fn: Callable[[T], R], items: Sequence[T], parallelism: int = 1) -> List[R]:
    """Synchronous entry to run_pool; runs inline when parallelism is 1."""
    if parallelism == 1 or len(items) <= 1:
        return [fn(i) for i in items]
    logger.debug(f"Running {len(items)} items on {parallelism} workers")
    return asyncio.run(run_pool(fn, items, parallelism))
