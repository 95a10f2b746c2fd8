"""
Parallel Map
============
Order-preserving map over a process pool. Results come back in input
order so aggregation is deterministic regardless of the worker count.
"""

import concurrent.futures
from typing import Callable, Iterable, List, Optional

from tqdm import tqdm

from config import settings


def parallel_map(func: Callable, items: Iterable, workers: Optional[int] = None,
                 description: Optional[str] = None, chunksize: int = 16) -> List:
    """
    Apply `func` to every item, in a process pool when workers > 1.

    Args:
        func: Picklable top-level function of one argument
        items: Inputs
        workers: Process count (defaults to settings.WORKERS; <= 1 runs serially)
        description: tqdm label; no progress bar when None or disabled in settings
        chunksize: Items sent to a worker at a time

    Returns:
        List of results in input order
    """
    items = list(items)
    workers = settings.WORKERS if workers is None else workers
    show = bool(description) and settings.SHOW_PROGRESS and len(items) > 1

    if workers <= 1:
        iterator = tqdm(items, desc=description, leave=False) if show else items
        return [func(item) for item in iterator]

    with concurrent.futures.ProcessPoolExecutor(workers) as executor:
        mapped = executor.map(func, items, chunksize=chunksize)
        if show:
            mapped = tqdm(mapped, total=len(items), desc=description, leave=False)
        return list(mapped)
