"""Dirichlet characters mod q with Conrey labels.

(Z/qZ)* is split by CRT into cyclic factors: one per odd prime power p^e,
generated by the least primitive root mod p^2, and for 2^e the factor
{+-1} (e >= 2) times <5> (e >= 3). A unit n has a log vector over these
factors; the Conrey character m evaluates as

    chi_m(n) = exp(2 pi i * sum_j log_j(m) log_j(n) / ord_j).

Angles are kept as exact integers modulo L = lcm(ord_j) and turned into
complex values only once, through a table of L-th roots of unity.
"""
import math
import threading
from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np

from utils.arith import euler_phi, factorize, least_primitive_root
from utils.errors import DomainError, NonUnitResidueError
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class CyclicFactor:
    """One cyclic factor of (Z/qZ)*, seen through n mod modulus."""
    modulus: int
    order: int
    kind: str  # "odd", "sign" or "five"
    generator: int


def _cyclic_factors(q: int) -> List[CyclicFactor]:
    factors: List[CyclicFactor] = []
    for p, e in sorted(factorize(q).items()):
        pe = p ** e
        if p == 2:
            if e >= 2:
                factors.append(CyclicFactor(pe, 2, "sign", pe - 1))
            if e >= 3:
                factors.append(CyclicFactor(pe, 2 ** (e - 2), "five", 5))
        else:
            g = least_primitive_root(p) % pe
            factors.append(CyclicFactor(pe, pe // p * (p - 1), "odd", g))
    return factors


def _discrete_log_table(factor: CyclicFactor) -> np.ndarray:
    """logs[r] for residues r mod factor.modulus (-1 where undefined)."""
    m = factor.modulus
    logs = np.full(m, -1, dtype=np.int64)
    if factor.kind == "sign":
        logs[1::4] = 0
        logs[3::4] = 1
        return logs
    x = 1
    for k in range(factor.order):
        logs[x] = k
        x = x * factor.generator % m
    if factor.kind == "five":
        # n = eps * 5^a with eps = +-1 mod 4; -n shares the exponent a
        for r in range(1, m, 2):
            if logs[r] < 0:
                logs[r] = logs[m - r]
    return logs


def _roots_of_unity(order: int) -> np.ndarray:
    k = np.arange(order, dtype=np.float64)
    roots = np.exp(2j * np.pi * k / order)
    # exact values on the quarter points keep real characters exactly real
    for j, value in ((0, 1.0), (1, 1j), (2, -1.0), (3, -1j)):
        if (j * order) % 4 == 0:
            roots[(j * order) // 4] = value
    return roots


class CharacterTable:
    """The full character group mod q, materialised lazily per character."""

    def __init__(self, q: int):
        if q < 3:
            raise DomainError(f"modulus must be >= 3, got {q}")
        self.modulus = q
        self.phi = euler_phi(q)
        self.factors = _cyclic_factors(q)
        self.exponent = math.lcm(*[f.order for f in self.factors]) if self.factors else 1

        residues = np.arange(q, dtype=np.int64)
        self._is_unit = np.gcd(residues, q) == 1
        self.units = residues[self._is_unit]

        # log vectors of every unit, one column per cyclic factor
        self._logs = np.zeros((q, len(self.factors)), dtype=np.int64)
        for j, factor in enumerate(self.factors):
            table = _discrete_log_table(factor)
            self._logs[:, j] = table[residues % factor.modulus]
        self._scale = np.array([self.exponent // f.order for f in self.factors], dtype=np.int64)

        self._roots = _roots_of_unity(self.exponent)
        self._cache: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()
        logger.debug(f"Character group mod {q}: phi={self.phi}, factors={self.factors}")

    @property
    def conrey_indices(self) -> List[int]:
        return [int(u) for u in self.units]

    @property
    def nonprincipal_indices(self) -> List[int]:
        return [int(u) for u in self.units if u != 1]

    def is_unit(self, a: int) -> bool:
        return bool(self._is_unit[a % self.modulus])

    def _check_index(self, conrey_index: int) -> int:
        m = conrey_index % self.modulus
        if not self._is_unit[m]:
            raise NonUnitResidueError(conrey_index, self.modulus)
        return m

    def angles(self, conrey_index: int) -> np.ndarray:
        """Integer angles k(n) mod exponent, chi(n) = exp(2 pi i k(n)/exponent)."""
        m = self._check_index(conrey_index)
        weights = (self._logs[m] * self._scale) % self.exponent
        return (self._logs @ weights) % self.exponent

    def values(self, conrey_index: int) -> np.ndarray:
        """chi(n) for n = 0..q-1, zero on non-units. Cached per character."""
        m = self._check_index(conrey_index)
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        vals = np.where(self._is_unit, self._roots[self.angles(m)], 0.0 + 0.0j)
        vals.setflags(write=False)
        with self._lock:
            self._cache.setdefault(m, vals)
        return self._cache[m]

    def evaluate(self, conrey_index: int, a: int) -> complex:
        """chi_{conrey_index}(a mod q)."""
        r = a % self.modulus
        if not self._is_unit[r]:
            raise NonUnitResidueError(a, self.modulus)
        return complex(self.values(conrey_index)[r])

    def value_matrix(self, conrey_indices: List[int], residues: List[int]) -> np.ndarray:
        """V[c, j] = chi_{conrey_indices[c]}(residues[j])."""
        cols = []
        for a in residues:
            if not self._is_unit[a % self.modulus]:
                raise NonUnitResidueError(a, self.modulus)
            cols.append(a % self.modulus)
        if not conrey_indices:
            return np.zeros((0, len(cols)), dtype=np.complex128)
        return np.stack([self.values(c)[cols] for c in conrey_indices])

    def entries(self) -> Iterator[Tuple[int, Dict[int, complex]]]:
        """(conrey_index, {unit: value}) for every character, materialising all."""
        for c in self.conrey_indices:
            vals = self.values(c)
            yield c, {int(u): complex(vals[u]) for u in self.units}

    def __len__(self) -> int:
        return self.phi

    def __repr__(self) -> str:
        return f"CharacterTable(modulus={self.modulus}, phi={self.phi})"


def character_group(q: int) -> CharacterTable:
    """Build the complete Dirichlet character table mod q."""
    return CharacterTable(q)


def evaluate(table: CharacterTable, conrey_index: int, a: int) -> complex:
    """chi(a) for the character with the given Conrey index."""
    return table.evaluate(conrey_index, a)
