"""Replication-level process pool with deterministic results.

Per-replication seeds are derived up front, so results do not depend on
the worker count; only the evaluation order does.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence


def default_threads() -> int:
    env = os.environ.get("STITLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (threads * 4))
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items, chunksize=chunk))
