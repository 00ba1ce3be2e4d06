"""Deterministic fan-out helper.

Work items are mapped in order and results reassembled by position, so the
output is identical for any worker count.  UDLAB_THREADS caps the default.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("UDLAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
    work: Sequence[T] = list(items)
    n = resolve_threads(threads)
    if n <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, work))
