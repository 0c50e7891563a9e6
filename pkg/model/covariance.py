"""Second-order data of the random model: Var(q), B_q(a, b), C_q(a), correlations.

Also the arithmetic sums that control the size of the correlations: the
Lambda-term, M1 and M2, and the averaged correlation check.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from arithmetic.characters import CharacterTable
from config.guards import cost_guards
from utils.arith import euler_phi, factorize, mod_inverse, prime_sieve, require_unit, von_mangoldt
from utils.errors import DomainError, RaceError
from utils.helpers import compensated_sum
from utils.logger import setup_logger
from zeros.zero_set import ZeroSet

logger = setup_logger(__name__)

IMAG_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CorrelationMatrix:
    """r[i][j] = B_q(a_i, a_j) / Var(q) over an ordered residue tuple."""
    q: int
    residues: Tuple[int, ...]
    var_q: float
    r: np.ndarray
    b: Optional[np.ndarray] = None
    partial: bool = False
    truncation_count: int = 0

    def __post_init__(self):
        arr = np.array(self.r, dtype=np.float64)
        arr.setflags(write=False)
        object.__setattr__(self, "r", arr)
        object.__setattr__(self, "residues", tuple(int(a) for a in self.residues))

    @property
    def n(self) -> int:
        return len(self.residues)

    @property
    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.r).min()) if self.n else 0.0

    def off_diagonal(self) -> np.ndarray:
        return self.r[~np.eye(self.n, dtype=bool)]


@dataclass(frozen=True)
class ShiftVector:
    """C_q(a) for each residue of a tuple."""
    residues: Tuple[int, ...]
    c: Tuple[int, ...] = field(default=())

    def as_array(self) -> np.ndarray:
        return np.asarray(self.c, dtype=np.float64)


class CorrelationAverage(NamedTuple):
    sum: float
    paper_form: float
    ratio: float


def cq_shift(q: int, a: int) -> int:
    """-1 + #{b mod q : b^2 = a}, counted prime power by prime power."""
    a = require_unit(a, q)
    count = 1
    for p, e in factorize(q).items():
        pe = p ** e
        r = a % pe
        if p == 2:
            if e == 1:
                roots = 1
            elif e == 2:
                roots = 2 if r % 4 == 1 else 0
            else:
                roots = 4 if r % 8 == 1 else 0
        else:
            roots = 2 if pow(r % p, (p - 1) // 2, p) == 1 else 0
        count *= roots
        if count == 0:
            break
    return count - 1


def shift_vector(q: int, residues: Sequence[int]) -> ShiftVector:
    """C_q(a) for every residue."""
    return ShiftVector(tuple(int(a) for a in residues), tuple(cq_shift(q, a) for a in residues))


def var_q(zs: ZeroSet) -> float:
    """2 * sum over characters and ordinates of 1/(1/4 + gamma^2)."""
    if not zs.blocks:
        raise DomainError("zero set is empty")
    weights = np.concatenate([b.weights for b in zs.blocks])
    return 2.0 * compensated_sum(weights)


class _PairData:
    """Character values on the residues, and per-block weights, shared by every pair."""

    def __init__(self, zs: ZeroSet, table: CharacterTable, residues: Sequence[int]):
        if table.modulus != zs.modulus:
            raise DomainError(f"character table is mod {table.modulus}, zero set is mod {zs.modulus}")
        self.weights = [b.weights for b in zs.blocks]
        self.values = table.value_matrix(zs.conrey_indices, list(residues))
        self.re = self.values.real
        self.im = self.values.imag

    def bq(self, i: int, j: int) -> float:
        if not self.weights:
            return 0.0
        # chi(b) conj(chi(a)) + chi(a) conj(chi(b)) = 2 (Re Re + Im Im)
        coef = 2.0 * (self.re[:, i] * self.re[:, j] + self.im[:, i] * self.im[:, j])
        value = compensated_sum(np.concatenate([c * w for c, w in zip(coef, self.weights)]))
        va, vb = self.values[:, i], self.values[:, j]
        naive = vb * np.conj(va) + va * np.conj(vb)
        imag = compensated_sum(np.concatenate([z.imag * w for z, w in zip(naive, self.weights)]))
        if abs(imag) >= IMAG_RESIDUAL_TOL * (abs(value) + 1.0):
            raise RaceError(f"B_q has imaginary residual {imag}")
        return value


def bq(zs: ZeroSet, table: CharacterTable, a: int, b: int) -> float:
    """B_q(a, b) = sum over chi != chi_0 and gamma of (chi(b/a) + chi(a/b))/(1/4 + gamma^2)."""
    q = zs.modulus
    ra, rb = require_unit(a, q), require_unit(b, q)
    if ra == rb:
        raise DomainError(f"B_q needs distinct residues, got {a} = {b} mod {q}")
    return _PairData(zs, table, [ra, rb]).bq(0, 1)


def correlation_matrix(zs: ZeroSet, table: CharacterTable, residues: Sequence[int],
                       workers: Optional[int] = None) -> CorrelationMatrix:
    """Normalized covariance r = B_q / Var(q) with unit diagonal."""
    q = zs.modulus
    reduced = [require_unit(a, q) for a in residues]
    if len(set(reduced)) != len(reduced):
        raise DomainError(f"duplicate residues mod {q}: {list(residues)}")
    n = len(reduced)
    variance = var_q(zs)
    data = _PairData(zs, table, reduced)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def entry(pair: Tuple[int, int]) -> float:
        return data.bq(*pair)

    if workers and workers > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(entry, pairs))
    else:
        values = [entry(p) for p in pairs]

    b = np.zeros((n, n))
    r = np.eye(n)
    for (i, j), v in zip(pairs, values):
        b[i, j] = b[j, i] = v
        r[i, j] = r[j, i] = v / variance
    np.fill_diagonal(b, variance)

    partial = not zs.is_complete
    if partial:
        logger.warning(f"Zero data mod {q} covers {len(zs.blocks)} characters; matrix flagged partial")
    cm = CorrelationMatrix(q, tuple(residues), variance, r, b, partial, zs.truncation_count)
    logger.debug(f"Correlation matrix mod {q}, n={n}, min eigenvalue {cm.min_eigenvalue:.3e}")
    return cm


def lambda_term(q: int, a: int, b: int) -> float:
    """Lambda(m)/phi(m) for m = q / gcd(q, a - b)."""
    if (a - b) % q == 0:
        raise DomainError(f"lambda_term needs a != b mod {q}")
    m = q // math.gcd(q, a - b)
    return von_mangoldt(m) / euler_phi(m)


def _sum_parameters(q: int) -> Tuple[float, int]:
    if q < 3:
        raise DomainError(f"modulus must be >= 3, got {q}")
    cost_guards.check_mangoldt_modulus(q)
    x = (q * math.log(q)) ** 2
    return x, int(math.floor(2.0 * x * math.log(x)))


def _progression_mangoldt_terms(q: int, n0: int, limit: int, x: float) -> List[float]:
    """Lambda(n) e^{-n/x} / n for all n <= limit with n = n0 mod q (gcd(n0, q) = 1)."""
    if n0 > limit:
        return []
    count = (limit - n0) // q + 1
    candidates = n0 + q * np.arange(count, dtype=np.int64)
    is_prime = np.ones(count, dtype=bool)
    if n0 == 1:
        is_prime[0] = False
    small = prime_sieve(math.isqrt(limit))
    for ell in small.tolist():
        if q % ell == 0:
            continue
        # first j with candidates[j] = 0 mod ell and candidates[j] >= ell^2
        j0 = (-n0 * pow(q, -1, ell)) % ell
        first = n0 + j0 * q
        if first < ell * ell:
            j0 += ((ell * ell - first + q * ell - 1) // (q * ell)) * ell
        if j0 < count:
            is_prime[j0::ell] = False
    primes = candidates[is_prime].astype(np.float64)
    terms = (np.log(primes) * np.exp(-primes / x) / primes).tolist()

    # proper prime powers in the class
    for p in small.tolist():
        if q % p == 0:
            continue
        log_p = math.log(p)
        power = p * p
        while power <= limit:
            if power % q == n0 % q:
                terms.append(log_p * math.exp(-power / x) / power)
            power *= p
    return terms


def m1_sum(q: int, a: int, d: int) -> float:
    """Sum of Lambda(n) e^{-n/x}/n over n <= 2x log x with a n = d mod q, x = (q log q)^2."""
    x, limit = _sum_parameters(q)
    n0 = require_unit(d, q) * mod_inverse(a, q) % q
    terms = _progression_mangoldt_terms(q, n0, limit, x)
    logger.debug(f"M1(q={q}, a={a}, d={d}): {len(terms)} prime powers up to {limit}")
    return compensated_sum(terms)


def m2_sum(q: int, a: int, d: int) -> float:
    """Sum over p^v || q and 1 <= e <= 2 log x with a p^e = d mod q/p^v of log p/(p^(e+v-1)(p-1))."""
    x, _ = _sum_parameters(q)
    require_unit(a, q)
    require_unit(d, q)
    e_max = int(math.floor(2.0 * math.log(x)))
    terms: List[float] = []
    for p, v in factorize(q).items():
        m = q // p ** v
        log_p = math.log(p)
        for e in range(1, e_max + 1):
            if m == 1 or (a * pow(p, e, m) - d) % m == 0:
                terms.append(log_p / (float(p) ** (e + v - 1) * (p - 1)))
    return compensated_sum(terms)


def correlation_average_report(r: CorrelationMatrix, I: Sequence[int], J: Sequence[int],
                               log_q: Optional[float] = None) -> CorrelationAverage:
    """Sum of |r_ij| over I x J against sqrt(|I||J|) log^2(2|I||J|) / log q.

    I and J are 0-based positions in the residue tuple; pairs with equal
    residues are skipped.
    """
    if not I or not J:
        raise DomainError("index subsets must be nonempty")
    if log_q is None:
        if r.q < 2:
            raise DomainError("log q is needed for a matrix without a modulus")
        log_q = math.log(r.q)
    residues = r.residues

    def same_class(i: int, j: int) -> bool:
        if r.q >= 2:
            return (residues[i] - residues[j]) % r.q == 0
        return i == j

    total = compensated_sum(abs(float(r.r[i, j])) for i in I for j in J if not same_class(i, j))
    size = len(I) * len(J)
    paper_form = math.sqrt(size) * math.log(2 * size) ** 2 / log_q
    return CorrelationAverage(total, paper_form, total / paper_form)


def large_cov_ratio(q: int, b_value: float) -> float:
    """B_q(a, -a) against its asymptotic -(log 2) phi(q)."""
    return b_value / (-math.log(2.0) * euler_phi(q))
