"""Synthetic zero ordinates with the density of zeros of a Dirichlet L-function."""
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np
from scipy import optimize

from arithmetic.characters import CharacterTable
from utils.errors import DomainError
from utils.logger import setup_logger
from utils.rng import STREAM_ZEROS, stream_generator
from zeros.zero_set import Provenance, SYNTHETIC, ZeroSet, make_zero_set

logger = setup_logger(__name__)

SPACING_LOW = 0.5
SPACING_HIGH = 1.5


def mean_spacing(q: int, gamma: float) -> float:
    """Local mean spacing 2 pi / log(q (gamma + 2) / 2 pi).

    The log is floored at 1 so that small moduli near gamma = 0 still get a
    positive, bounded spacing.
    """
    return 2.0 * math.pi / max(math.log(q * (gamma + 2.0) / (2.0 * math.pi)), 1.0)


def first_ordinate_height(q: int) -> float:
    """Height T at which (T / 2 pi) log(q T / 2 pi e), the expected number of ordinates in (0, T], is 1/2."""
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")
    low = 2.0 * math.pi * math.e / q
    # the count is increasing past low and exceeds 1/2 once T > pi and log(...) >= 1
    high = max(math.e * low, math.pi) + 1.0
    return optimize.brentq(lambda t: t * math.log(q * t / (2.0 * math.pi * math.e)) - math.pi,
                           low, high, xtol=1e-12)


def _synthesize_block(q: int, conrey_index: int, count: int, seed: int) -> np.ndarray:
    rng = stream_generator(seed, STREAM_ZEROS, conrey_index)
    u = rng.random(count)
    gammas = np.empty(count, dtype=np.float64)
    height = first_ordinate_height(q)
    # first ordinate within half a spacing of the height, never below height / 2
    width = min(mean_spacing(q, height), height)
    gamma = height + (u[0] - 0.5) * width
    gammas[0] = gamma
    for k in range(1, count):
        m = mean_spacing(q, gamma)
        gamma = gamma + m * (SPACING_LOW + (SPACING_HIGH - SPACING_LOW) * u[k])
        gammas[k] = gamma
    return gammas


def synthesize_zeros(q: int, table: CharacterTable, count_per_char: int, seed: int,
                     workers: Optional[int] = None) -> ZeroSet:
    """One synthetic block per non-principal character, deterministic in (q, count, seed)."""
    if count_per_char < 1:
        raise DomainError(f"count_per_char must be >= 1, got {count_per_char}")
    if table.modulus != q:
        raise DomainError(f"character table is mod {table.modulus}, not {q}")

    indices = table.nonprincipal_indices
    logger.info(f"Synthesizing {count_per_char} zeros for {len(indices)} characters mod {q}")

    def build(idx: int) -> Tuple[int, np.ndarray]:
        return idx, _synthesize_block(q, idx, count_per_char, seed)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks: List[Tuple[int, np.ndarray]] = list(pool.map(build, indices))
    else:
        blocks = [build(idx) for idx in indices]

    provenance = Provenance(
        kind=SYNTHETIC,
        seed=seed,
        model_params=(("count", count_per_char), ("low", SPACING_LOW), ("high", SPACING_HIGH)),
    )
    return make_zero_set(q, blocks, provenance)
