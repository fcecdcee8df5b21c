import os
from concurrent.futures import ThreadPoolExecutor

from .errors import ParameterError

THREADS_ENV = "HINDEP_THREADS"


def resolve_threads(threads=None):
    """Explicit value, else ``$HINDEP_THREADS``, else 1."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        threads = int(raw) if raw else 1
    threads = int(threads)
    if threads < 1:
        raise ParameterError(f"thread count must be >= 1, got {threads}")
    return threads


def ordered_map(fn, items, threads=None):
    """``[fn(i) for i in items]``, optionally on a thread pool; order is kept."""
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
