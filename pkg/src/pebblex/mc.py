"""Seeded, chunked Monte Carlo counting.

Every chunk of samples draws from its own counter-based stream keyed by
``(seed, *query_key, chunk_index)``, so counts do not depend on how many
workers evaluate the chunks or in which order they finish.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import norm

Z95 = float(norm.ppf(0.975))


def _key_word(k) -> int:
    if isinstance(k, str):
        return int.from_bytes(hashlib.sha256(k.encode()).digest()[:8], "little")
    return int(k)


def stream(seed: int, *key) -> np.random.Generator:
    """Independent Philox generator for ``(seed, *key)``; string keys are hashed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_word(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, *key) -> int:
    """A 63-bit child seed for ``(seed, *key)``, independent of evaluation order."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_word(k) for k in key))
    hi, lo = (int(w) for w in ss.generate_state(2, np.uint32))
    return ((hi << 32) | lo) >> 1


def wilson_interval(hits: int, n: int, z: float = Z95) -> tuple[float, float]:
    if n == 0:
        return 0.0, 1.0
    phat = hits / n
    denom = 1 + z * z / n
    centre = (phat + z * z / (2 * n)) / denom
    half = z * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo proportion with a Wilson interval."""

    value: float
    ci_low: float
    ci_high: float
    samples: int
    hits: int

    @property
    def sigma(self) -> float:
        p = self.value
        return math.sqrt(max(p * (1 - p), 0.0) / self.samples) if self.samples else 0.0


def chunk_rows(n: int, target_cells: int = 1 << 21) -> int:
    """Rows per chunk for a base of size ``n``; depends on ``n`` only."""
    return int(max(64, min(1 << 16, target_cells // max(n, 1))))


def count_hits(trial: Callable[[np.random.Generator, int], np.ndarray], samples: int,
               seed: int, key: tuple, chunk: int, start: int = 0,
               workers: int = 1) -> int:
    """Sum of ``trial(rng, rows)`` over samples ``start .. samples-1``.

    ``start`` and ``samples`` are sample indices; chunk ``c`` covers
    ``[c*chunk, (c+1)*chunk)`` and a partial chunk takes a prefix of its
    stream, so extending a count later gives the same total as one call.
    """
    tasks = []
    c = start // chunk
    while c * chunk < samples:
        lo = max(c * chunk, start)
        hi = min((c + 1) * chunk, samples)
        tasks.append((c, lo - c * chunk, hi - c * chunk))
        c += 1

    def run(task):
        c, a, b = task
        rng = stream(seed, *key, c)
        hits = np.asarray(trial(rng, b))
        return int(np.count_nonzero(hits[a:b]))

    if workers <= 1 or len(tasks) <= 1:
        return sum(run(t) for t in tasks)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(run, tasks))


def estimate(trial, samples: int, seed: int, key: tuple, chunk: int,
             workers: int = 1, z: float = Z95) -> Estimate:
    hits = count_hits(trial, samples, seed, key, chunk, workers=workers)
    lo, hi = wilson_interval(hits, samples, z)
    return Estimate(hits / samples if samples else 0.0, lo, hi, samples, hits)
