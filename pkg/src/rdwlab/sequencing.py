"""Randomised gain order for a participant's trial blocks."""

from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["DEFAULT_GAINS", "DEFAULT_REPETITIONS", "fisher_yates", "shuffle_gains", "sequence_table"]

DEFAULT_GAINS = tuple(round(0.5 + 0.1 * i, 1) for i in range(11))
DEFAULT_REPETITIONS = 5

_SEED_MASK = (1 << 64) - 1


def fisher_yates(items: Sequence, rng: np.random.Generator) -> list:
    """Uniform random permutation (Durstenfeld's in-place variant) of a copy of ``items``."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out


def shuffle_gains(seed: int, gains: Sequence[float] = DEFAULT_GAINS, reps: int = DEFAULT_REPETITIONS) -> list[float]:
    """Shuffle ``reps`` copies of ``gains``; the seed is reduced to 64 bits."""
    if not len(gains):
        raise ValueError("gains must be non-empty")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    rng = np.random.default_rng(int(seed) & _SEED_MASK)
    return fisher_yates(list(gains) * int(reps), rng)


def sequence_table(seeds: Sequence[int], gains: Sequence[float] = DEFAULT_GAINS,
                   reps: int = DEFAULT_REPETITIONS) -> dict:
    """One stored sequence per seed, in the layout written by the ``sequence`` command."""
    return {
        "gains": list(gains),
        "repetitions": int(reps),
        "sequences": [{"seed": int(s), "sequence": shuffle_gains(s, gains, reps)} for s in seeds],
    }
