"""Derived random streams and deterministic block-parallel maps.

Each block of trials draws from its own generator seeded by
``SeedSequence([seed, tag, *keys, block])``, so results depend only on the
seed and the block size, never on the number of worker threads.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor

import numpy as np

DEFAULT_BLOCK = 256


def _key(x) -> int:
    if isinstance(x, str):
        return zlib.crc32(x.encode())
    return int(x)


def derive_rng(seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([_key(seed)] + [_key(k) for k in keys]))


def block_map(fn, n_items: int, seed: int, keys=(), block: int = DEFAULT_BLOCK, threads: int = 1) -> np.ndarray:
    """Concatenate ``fn(count, rng)`` over blocks of ``n_items``, in block order."""
    starts = list(range(0, n_items, block))
    jobs = [(min(block, n_items - s), derive_rng(seed, *keys, i)) for i, s in enumerate(starts)]
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda job: fn(*job), jobs))
    else:
        parts = [fn(*job) for job in jobs]
    return np.concatenate(parts) if parts else np.empty(0)


def ordered_map(fn, items, threads: int = 1) -> list:
    """``[fn(x) for x in items]``, optionally on a thread pool; order preserved."""
    items = list(items)
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]
