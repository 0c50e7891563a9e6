"""ZeroSet: per-character lists of positive zero ordinates."""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from utils.errors import ZeroFileValidationError
from utils.helpers import compensated_sum

REAL_DATA = "real"
SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class Provenance:
    """Where a ZeroSet came from."""
    kind: str = REAL_DATA
    seed: Optional[int] = None
    model_params: Tuple[Tuple[str, float], ...] = ()

    @property
    def is_synthetic(self) -> bool:
        return self.kind == SYNTHETIC

    def describe(self) -> str:
        if not self.is_synthetic:
            return "real"
        params = " ".join(f"{k}={v}" for k, v in self.model_params)
        return f"synthetic seed={self.seed} {params}".strip()


@dataclass(frozen=True, eq=False)
class ZeroBlock:
    """Ordinates gamma_chi > 0 of one non-principal character, increasing."""
    conrey_index: int
    gammas: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.gammas, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "gammas", arr)

    def __len__(self) -> int:
        return int(self.gammas.size)

    @property
    def weights(self) -> np.ndarray:
        """1/(1/4 + gamma^2) for every ordinate."""
        return 1.0 / (0.25 + self.gammas * self.gammas)

    @property
    def weight_sum(self) -> float:
        return compensated_sum(self.weights)

    @property
    def amplitudes(self) -> np.ndarray:
        """1/sqrt(1/4 + gamma^2), the coefficient of U(gamma) in the model."""
        return 1.0 / np.sqrt(0.25 + self.gammas * self.gammas)


@dataclass(frozen=True, eq=False)
class ZeroSet:
    """Validated zero data for every non-principal character mod q it covers."""
    modulus: int
    blocks: Tuple[ZeroBlock, ...]
    provenance: Provenance = field(default_factory=Provenance)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        validate_zero_set(self)

    @property
    def conrey_indices(self) -> List[int]:
        return [b.conrey_index for b in self.blocks]

    def block(self, conrey_index: int) -> Optional[ZeroBlock]:
        for b in self.blocks:
            if b.conrey_index == conrey_index:
                return b
        return None

    @property
    def is_complete(self) -> bool:
        """Blocks exist for all phi(q) - 1 non-principal characters."""
        units = sum(1 for a in range(1, self.modulus) if math.gcd(a, self.modulus) == 1)
        return len(self.blocks) == units - 1

    @property
    def truncation_count(self) -> int:
        """Total number of ordinates (all zero sums stop here)."""
        return sum(len(b) for b in self.blocks)

    @property
    def max_height(self) -> float:
        return max((float(b.gammas[-1]) for b in self.blocks), default=0.0)

    @property
    def truncation_height(self) -> float:
        """Smallest block height: every block reaches at least this ordinate."""
        return min((float(b.gammas[-1]) for b in self.blocks), default=0.0)

    def summary(self) -> Dict[str, object]:
        return {
            "modulus": self.modulus,
            "blocks": len(self.blocks),
            "complete": self.is_complete,
            "truncation_count": self.truncation_count,
            "max_height": self.max_height,
            "provenance": self.provenance.describe(),
        }


def validate_zero_set(zs: ZeroSet) -> None:
    """Check every ZeroSet invariant, raising ZeroFileValidationError."""
    q = zs.modulus
    if q < 3:
        raise ZeroFileValidationError(f"modulus must be >= 3, got {q}")
    seen = set()
    for b in zs.blocks:
        idx = b.conrey_index
        if math.gcd(idx % q, q) != 1:
            raise ZeroFileValidationError(f"conrey index not a unit: {idx} mod {q}")
        if idx % q == 1:
            raise ZeroFileValidationError("principal character (conrey index 1) has no block")
        if idx in seen:
            raise ZeroFileValidationError(f"duplicate block for conrey index {idx}")
        seen.add(idx)
        g = b.gammas
        if g.ndim != 1 or g.size == 0:
            raise ZeroFileValidationError(f"empty block for conrey index {idx}")
        if not np.all(np.isfinite(g)) or g[0] <= 0:
            raise ZeroFileValidationError(f"gammas must be positive for conrey index {idx}")
        if g.size > 1 and not np.all(np.diff(g) > 0):
            bad = int(np.flatnonzero(np.diff(g) <= 0)[0]) + 1
            raise ZeroFileValidationError(
                f"gammas not increasing for conrey index {idx} at position {bad}"
            )


def make_zero_set(modulus: int, blocks: Iterable[Tuple[int, Iterable[float]]],
                  provenance: Optional[Provenance] = None) -> ZeroSet:
    """Build a ZeroSet from (conrey_index, gammas) pairs."""
    built = tuple(ZeroBlock(int(c), np.asarray(list(g), dtype=np.float64)) for c, g in blocks)
    return ZeroSet(modulus, built, provenance or Provenance())
