"""Deterministic seed derivation for Monte Carlo trials and simulation runs.

All randomness in the package flows from a single master seed.  Independent
work items (trials, runs) get their own streams keyed by index, so results
do not depend on execution order or chunking.
"""

from __future__ import annotations

import numpy as np


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def keyed_seed(master: int, *key: int) -> np.random.SeedSequence:
    """Seed for work item ``key`` under ``master``; stable across chunkings."""
    return np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in key))


def substreams(seed, n: int) -> list[np.random.Generator]:
    """Split ``seed`` into ``n`` independent generators."""
    return [np.random.default_rng(s) for s in as_seed_sequence(seed).spawn(n)]
