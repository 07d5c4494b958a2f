"""Counter-based random streams and the block layout that makes runs reproducible.

Paths are cut into fixed-size blocks; each block owns one Philox stream, so the
numbers a path sees depend only on (seed, block index) and never on how the
blocks are scheduled across worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

T = TypeVar("T")

_BLOCK_COUNTER_SHIFT = 128


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=block << _BLOCK_COUNTER_SHIFT))


def block_layout(n_paths: int, block_size: int) -> list[tuple[int, int]]:
    """Half-open [start, stop) path ranges, one per block."""
    return [(start, min(start + block_size, n_paths)) for start in range(0, n_paths, block_size)]


def run_blocks(
    work: Callable[[int, int], T],
    n_paths: int,
    block_size: int,
    workers: int = 1,
) -> list[T]:
    """Run ``work(block_index, n_in_block)`` for every block, results in block order."""
    sizes = [stop - start for start, stop in block_layout(n_paths, block_size)]
    if workers <= 1 or len(sizes) == 1:
        return [work(b, m) for b, m in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, range(len(sizes)), sizes))
