"""Ordered thread-pool map; the thread count only affects wall time."""

import os
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "NONCONV_THREADS"


def thread_count(threads=None):
    if threads is None:
        threads = os.environ.get(THREADS_ENV) or os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError("thread count must be >= 1")
    return threads


def map_ordered(fn, items, threads=None):
    """``[fn(x) for x in items]``, possibly in parallel, results in input order."""
    items = list(items)
    n = min(thread_count(threads), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
