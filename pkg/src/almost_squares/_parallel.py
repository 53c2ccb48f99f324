"""Ordered data-parallel map; results never depend on the worker count."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor


def chunk_range(lo: int, hi: int, parts: int):
    """Split [lo, hi] into at most ``parts`` contiguous inclusive ranges."""
    parts = max(1, min(parts, hi - lo + 1))
    size, extra = divmod(hi - lo + 1, parts)
    start = lo
    for i in range(parts):
        end = start + size + (i < extra) - 1
        yield start, end
        start = end + 1


def parallel_map(func, items, workers: int = 1):
    """``list(map(func, items))``, spread over processes when workers > 1.

    ``func`` must be a picklable module-level callable.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
