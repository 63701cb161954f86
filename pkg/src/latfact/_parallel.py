"""Optional threading for multi-restart searches.

Restarts are independent and reduced in index order, so results are
bit-identical whether they run sequentially or on a thread pool.  The pool
size is capped by the LATFACT_THREADS environment variable (default 1).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")


def env_threads() -> int:
    raw = os.environ.get("LATFACT_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, min(value, 32))


def indexed_map(fn: Callable[[int], T], indices: Sequence[int]) -> list[T]:
    """Apply ``fn`` to every index, returning results in index order."""
    workers = env_threads()
    if workers <= 1 or len(indices) <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, indices))
