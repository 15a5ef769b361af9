"""Seeded random streams keyed by task.

Every stream derives from ``SeedSequence((seed, *key))`` so that results
depend only on the key, never on the order in which tasks run.
"""
from __future__ import annotations

import random

import numpy as np

MODEL_CODES = {"CBA": 1, "FF": 2, "SBM": 3, "TWO_K": 4}

MASK64 = (1 << 64) - 1


def _entropy(seed: int, key) -> list[int]:
    words = [int(seed) & MASK64]
    for k in key:
        words.append(MODEL_CODES[k] if isinstance(k, str) else int(k) & MASK64)
    return words


def numpy_rng(seed: int, *key) -> np.random.Generator:
    """Counter-based Philox generator for ``(seed, *key)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_entropy(seed, key))))


def python_rng(seed: int, *key) -> random.Random:
    """Stdlib generator for scalar-heavy loops, seeded from the same key."""
    state = np.random.SeedSequence(_entropy(seed, key)).generate_state(4, dtype=np.uint64)
    return random.Random(int.from_bytes(state.tobytes(), "little"))
