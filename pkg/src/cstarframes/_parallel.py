"""Opt-in thread fan-out for per-sample batch loops."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "CSTAR_FRAMES_THREADS"


def thread_count() -> int:
    """Worker cap from the environment; anything unparseable means serial."""
    raw = os.environ.get(ENV_VAR, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def pmap(fn, items) -> list:
    """Order-preserving map, threaded when the env cap allows it.

    Results are returned in input order regardless of worker count, so
    callers stay deterministic.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))
