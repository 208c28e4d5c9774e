"""
Ordered parallel map over independent work items.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    try:
        return max(1, int(os.getenv("GAUDIN_THREADS", "1")))
    except ValueError:
        logger.warning("Invalid GAUDIN_THREADS value, running single-threaded")
        return 1


def ordered_map(fn: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None) -> List[R]:
    """Apply fn to every item; results come back in input order whatever the worker count."""
    items = list(items)
    workers = max_workers or default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def spawn_seeds(seed: int, count: int) -> List[np.random.SeedSequence]:
    """Independent child seeds, one per work item index."""
    return np.random.SeedSequence(seed).spawn(count)
