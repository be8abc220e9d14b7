"""Per-trial random streams derived from one master seed."""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    """Named spawn-key prefixes; distinct streams never share draws."""

    OUTCOMES = 0
    PREPARATION = 1
    SETTINGS_A = 2
    SETTINGS_B = 3
    BATH = 4


def trial_rng(seed: int, trial: int, stream: int = Stream.OUTCOMES) -> np.random.Generator:
    """Generator for ``trial`` on ``stream``; reproducible and parallel-safe."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(trial)))
    return np.random.default_rng(sequence)


__all__ = ["Stream", "trial_rng"]
