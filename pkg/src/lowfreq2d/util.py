"""Shared plumbing: bounded parallel maps over spectral grids."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

_ENV = "LOWFREQ2D_THREADS"


def thread_cap() -> int:
    raw = os.environ.get(_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items: list):
    """map() preserving order; threads capped by LOWFREQ2D_THREADS (default 1)."""
    cap = thread_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(cap, len(items))) as ex:
        return list(ex.map(fn, items))
