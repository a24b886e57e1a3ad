"""Deterministic counter-based random streams.

Every stochastic routine in the library takes an explicit :class:`SeededRng`.
Substreams are derived by rekeying the underlying Philox generator rather
than by drawing from a shared generator, so a fixed ``(seed, stream)`` pair
reproduces the same values no matter how batches are scheduled across
threads.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Fixed batch size for Monte Carlo draws. The partition of n samples into
# batches depends only on n, never on the thread count, which is what makes
# threaded and serial draws byte-identical.
BATCH_SIZE = 1 << 14


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def thread_count() -> int:
    """Worker count for batched draws, from SPECBOUND_THREADS (default: all cores)."""
    raw = os.environ.get("SPECBOUND_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError as exc:
            raise ValueError(f"SPECBOUND_THREADS must be an integer, got {raw!r}") from exc
        return max(1, n)
    return os.cpu_count() or 1


@dataclass(frozen=True)
class SeededRng:
    """Immutable handle on a counter-based random stream.

    ``generator()`` returns a fresh NumPy generator positioned at the start
    of the stream, so the handle itself carries no mutable state.
    """

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "SeededRng":
        if index < 0:
            raise ValueError("substream index must be nonnegative")
        mixed = _splitmix64(((self.stream & _MASK64) * _GOLDEN + index + 1) & _MASK64)
        return SeededRng(self.seed, mixed)


def draw_batched(
    rng: SeededRng,
    n: int,
    draw: Callable[[np.random.Generator, int], np.ndarray],
    workers: int | None = None,
) -> np.ndarray:
    """Draw n rows in fixed batches, one substream per batch.

    ``draw(gen, count)`` must return an array whose leading axis has length
    ``count``. Results are concatenated in batch order, so the output is
    independent of ``workers``.
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    counts = [min(BATCH_SIZE, n - start) for start in range(0, n, BATCH_SIZE)]
    if workers is None:
        workers = thread_count()

    def one(idx_count: tuple[int, int]) -> np.ndarray:
        idx, count = idx_count
        return draw(rng.substream(idx).generator(), count)

    jobs = list(enumerate(counts))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(job) for job in jobs]
    if len(parts) == 1:
        return parts[0]
    return np.concatenate(parts, axis=0)
