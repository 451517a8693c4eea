"""Seeded random streams.

Every stochastic routine draws from numpy's PCG64 generator. A master seed
is split into independent per-purpose streams through ``SeedSequence``
spawn keys, so graph generation and percolation runs never share state and
results are identical across platforms for the same seed.
"""

from __future__ import annotations

import numpy as np

GENERATION = 1
PERCOLATION = 2


def stream(seed: int, purpose: int, *index: int) -> np.random.Generator:
    """Generator for ``purpose`` (and optional sub-indices) under ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(purpose, *index))
    return np.random.Generator(np.random.PCG64(ss))


def run_seeds(seed: int, runs: int) -> np.ndarray:
    """Deterministic 64-bit seeds, one per Monte Carlo run."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(PERCOLATION,))
    return ss.generate_state(runs, dtype=np.uint64)
