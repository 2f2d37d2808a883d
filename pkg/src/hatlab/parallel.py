"""Deterministic work distribution.

Results are reduced in submission order, so the outcome is identical for any
worker count, including 1 (the contract every solver in this package relies
on for reproducibility).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

ENV_THREADS = "HATLAB_THREADS"


def default_threads() -> int:
    raw = os.environ.get(ENV_THREADS, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Apply fn to every item, returning results in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def chunked(seq: Sequence[T], chunks: int) -> list[Sequence[T]]:
    """Split seq into at most `chunks` contiguous pieces of near-equal size."""
    n = len(seq)
    chunks = max(1, min(chunks, n)) if n else 1
    size, extra = divmod(n, chunks)
    out = []
    start = 0
    for i in range(chunks):
        end = start + size + (1 if i < extra else 0)
        out.append(seq[start:end])
        start = end
    return [c for c in out if len(c)]
