"""Race patterns over an n-tuple and the estimates attached to them."""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from utils.errors import DomainError
from utils.helpers import parse_int_list

FULL = "full"
LEADER = "leader"
FIRSTK = "firstk"

MODEL_X = "x"
MODEL_Z = "z"
MODEL_SIEVE = "sieve"


@dataclass(frozen=True)
class OrderingEvent:
    """An ordering pattern over positions 0..n-1.

    full:     X[p0] > X[p1] > ... > X[p_{n-1}]
    leader:   X[i] > X[j] for every j != i
    firstk:   X[0] > X[1] > ... > X[k-1] > max(X[k:])
    """
    kind: str
    n: int
    permutation: Tuple[int, ...] = ()
    index: int = 0
    k_value: int = 0

    @classmethod
    def full(cls, permutation, n: Optional[int] = None) -> "OrderingEvent":
        perm = tuple(int(p) for p in permutation)
        n = len(perm) if n is None else n
        if sorted(perm) != list(range(n)):
            raise DomainError(f"full ordering must be a permutation of 1..{n}")
        return cls(FULL, n, permutation=perm)

    @classmethod
    def leader(cls, index: int, n: int) -> "OrderingEvent":
        if not 0 <= index < n:
            raise DomainError(f"leader index {index + 1} outside 1..{n}")
        return cls(LEADER, n, index=index)

    @classmethod
    def first_k(cls, k: int, n: int) -> "OrderingEvent":
        if not 1 <= k <= n:
            raise DomainError(f"firstk needs 1 <= k <= n, got k={k}, n={n}")
        if k >= n - 1:
            # ordering the first n-1 already orders all n
            return cls.full(range(n))
        return cls(FIRSTK, n, k_value=k)

    @property
    def k(self) -> int:
        """Number of leading places the event fixes."""
        if self.kind == FULL:
            return max(self.n - 1, 0)
        if self.kind == LEADER:
            return 1
        return self.k_value

    @property
    def label(self) -> str:
        if self.kind == FULL:
            return "full:" + ",".join(str(p + 1) for p in self.permutation)
        if self.kind == LEADER:
            return f"leader:{self.index + 1}"
        return f"firstk:{self.k_value}"

    def prediction(self) -> float:
        """(n-k)!/n!: 1/n! for full, 1/n for leader."""
        if self.n <= 1:
            return 1.0
        return 1.0 / math.perm(self.n, self.k)

    def evaluate(self, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """(hits, ties) boolean arrays over the rows of an (m, n) array.

        A comparison of the pattern that holds with equality is a tie; ties
        are never hits.
        """
        values = np.asarray(values)
        if values.ndim == 1:
            values = values[None, :]
        if values.shape[1] != self.n:
            raise DomainError(f"event over {self.n} contestants applied to {values.shape[1]}")
        m = values.shape[0]
        if self.n == 1:
            return np.ones(m, dtype=bool), np.zeros(m, dtype=bool)

        if self.kind == FULL:
            ordered = values[:, list(self.permutation)]
            hits = np.all(ordered[:, :-1] > ordered[:, 1:], axis=1)
            ties = np.any(ordered[:, :-1] == ordered[:, 1:], axis=1)
            return hits, ties

        if self.kind == LEADER:
            lead = values[:, self.index]
            rest = np.delete(values, self.index, axis=1).max(axis=1)
            return lead > rest, lead == rest

        head = values[:, :self.k_value]
        rest = values[:, self.k_value:].max(axis=1)
        last = head[:, -1]
        hits = np.all(head[:, :-1] > head[:, 1:], axis=1) & (last > rest)
        ties = np.any(head[:, :-1] == head[:, 1:], axis=1) | (last == rest)
        return hits, ties


def parse_event(text: str, n: int) -> OrderingEvent:
    """Parse 'full:i1,...,in', 'leader:i' or 'firstk:k' (1-based positions)."""
    kind, sep, arg = (text or "").strip().partition(":")
    kind = kind.strip().lower()
    if not sep or not arg.strip():
        raise DomainError(f"malformed event {text!r}; expected full:..., leader:i or firstk:k")
    try:
        if kind == FULL:
            perm = parse_int_list(arg)
            if len(perm) != n:
                raise DomainError(f"full ordering {text!r} must list all {n} positions")
            return OrderingEvent.full([p - 1 for p in perm], n)
        if kind == LEADER:
            return OrderingEvent.leader(int(arg) - 1, n)
        if kind == FIRSTK:
            return OrderingEvent.first_k(int(arg), n)
    except ValueError as e:
        if isinstance(e, DomainError):
            raise
        raise DomainError(f"malformed event {text!r}: {e}") from None
    raise DomainError(f"unknown event kind {kind!r}")


@dataclass(frozen=True)
class DensityEstimate:
    """A probability or logarithmic density with its error and the prediction it is checked against."""
    value: float
    stderr: float
    samples: int
    model: str
    event: OrderingEvent
    hits: int = 0
    ties: int = 0
    prediction: Optional[float] = None
    bound: Optional[float] = None

    @classmethod
    def from_counts(cls, hits: int, ties: int, samples: int, model: str, event: OrderingEvent,
                    bound: Optional[float] = None) -> "DensityEstimate":
        value = hits / samples
        stderr = math.sqrt(value * (1.0 - value) / samples)
        return cls(value, stderr, samples, model, event, hits, ties, event.prediction(), bound)

    def z_score(self) -> Optional[float]:
        """(value - prediction) in units of stderr."""
        if self.prediction is None or self.stderr == 0:
            return None
        return (self.value - self.prediction) / self.stderr
