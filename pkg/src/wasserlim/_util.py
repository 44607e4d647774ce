"""Internal helpers: seeded RNG streams, worker pool, float formatting."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")

#: Environment variable capping the worker count for batch operations.
THREADS_ENV = "WASSERLIM_THREADS"


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Derived random stream for ``(seed, path...)``.

    Streams are Philox counter-based generators keyed by
    ``SeedSequence(entropy=seed, spawn_key=path)``. The same (seed, path)
    always yields the same draw sequence, and distinct paths give
    statistically independent streams, which is what lets per-pair seeds
    match across a sequence of spaces.
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


def worker_count() -> int:
    """Worker cap from the environment; defaults to 1 (sequential)."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def ordered_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Map ``fn`` over ``items``, preserving order.

    Runs on a thread pool when WASSERLIM_THREADS > 1. Results are collected
    in input order either way, so reductions downstream see a deterministic
    sequence.
    """
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt17(x: float) -> str:
    """Serialize a float with 17 significant digits (golden-test exact)."""
    return format(float(x), ".17g")


def as_weight_vector(values: Iterable[float], n: int, what: str) -> np.ndarray:
    """Finite nonnegative float vector of length ``n``; raises ValueError."""
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                     dtype=np.float64)
    if arr.shape != (n,):
        raise ValueError(f"{what}: expected {n} entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what}: entries must be finite")
    if np.any(arr < 0):
        raise ValueError(f"{what}: entries must be nonnegative")
    return arr
