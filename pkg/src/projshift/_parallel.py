"""Worker-count plumbing. ``SHIFT_THREADS`` caps the pool; 0 means one per CPU.

Unset means serial: most windows are cheap and process start-up dominates.
"""
import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("SHIFT_THREADS", "").strip()
    if not raw:
        return 1
    n = int(raw)
    if n < 0:
        raise ValueError(f"SHIFT_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def ordered_map(fn, items):
    """``map`` whose results come back in input order whatever the pool size."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
