"""Small numerical kernels used by several modules."""

from __future__ import annotations

import contextvars
import math
import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi
THREADS_ENV = "CARDINAL_MRA_THREADS"


def neumaier_add(total: np.ndarray, comp: np.ndarray, x: np.ndarray) -> None:
    """Add ``x`` into the running compensated sum ``(total, comp)`` in place."""
    t = total + x
    big = np.abs(total) >= np.abs(x)
    comp += np.where(big, (total - t) + x, (x - t) + total)
    total[...] = t


def reduce_mod_2pi(xi: np.ndarray) -> np.ndarray:
    """Map each coordinate into [-pi, pi] by subtracting a multiple of 2*pi."""
    xi = np.asarray(xi, dtype=float)
    return xi - TWO_PI * np.round(xi / TWO_PI)


@lru_cache(maxsize=4096)
def shell(n: int, m: int) -> np.ndarray:
    """Integer points j in Z^n with max-norm exactly ``m``, in a fixed order.

    Returned as a read-only (count, n) int array.
    """
    if m == 0:
        pts = np.zeros((1, n), dtype=np.int64)
    elif n == 1:
        pts = np.array([[-m], [m]], dtype=np.int64)
    else:
        # lexicographic: faces x_1 = -m and x_1 = m are full (n-1)-cubes,
        # the slices in between contribute an (n-1)-shell each
        axis = np.arange(-m, m + 1)
        grids = np.meshgrid(*([axis] * (n - 1)), indexing="ij")
        face = np.stack([g.ravel() for g in grids], axis=1)
        ring = shell(n - 1, m)
        parts = [np.column_stack([np.full(len(face), -m), face])]
        parts += [np.column_stack([np.full(len(ring), x), ring]) for x in range(-m + 1, m)]
        parts.append(np.column_stack([np.full(len(face), m), face]))
        pts = np.concatenate(parts).astype(np.int64)
    pts.setflags(write=False)
    return pts


def shell_count(n: int, m: int) -> int:
    if m == 0:
        return 1
    return (2 * m + 1) ** n - (2 * m - 1) ** n


def cube_grid(n: int, points: int, half: float = math.pi) -> np.ndarray:
    """Uniform grid on [-half, half]^n with ``points`` samples per axis, shape (points**n, n)."""
    axis = np.linspace(-half, half, points)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        if workers < 1:
            raise ValueError("workers must be positive")
        return workers
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def map_blocks(func, rows: np.ndarray, workers: int | None = None, block: int = 1024):
    """Apply ``func`` to consecutive row blocks of ``rows`` and concatenate.

    ``func`` must treat rows independently, so the result does not depend on
    the number of workers.
    """
    rows = np.asarray(rows)
    n = len(rows)
    workers = worker_count(workers)
    starts = list(range(0, n, block)) or [0]
    chunks = [rows[s:s + block] for s in starts]
    if workers == 1 or len(chunks) == 1:
        parts = [func(c) for c in chunks]
    else:
        ctx = contextvars.copy_context()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: ctx.copy().run(func, c), chunks))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate(p) for p in zip(*parts))
    return np.concatenate(parts)
