"""Counter-based random streams keyed by (seed, key...)."""
from typing import Tuple

import numpy as np

STREAM_ZEROS = 0
STREAM_MC = 1
STREAM_CHECKS = 2


def stream_generator(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for (seed, key); the same inputs always give the same draws."""
    spawn_key: Tuple[int, ...] = tuple(int(k) for k in key)
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=spawn_key)
    return np.random.Generator(np.random.Philox(ss))
