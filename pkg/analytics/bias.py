"""Biased races: the tuple construction, the first-two ordering density, and the A threshold."""
import math
from typing import List, Tuple

from scipy import integrate
from scipy.special import log_ndtr
from sympy import nextprime

from analytics.normal import LOG_SQRT_2PI
from utils.arith import is_unit, units
from utils.errors import DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)

X_LOW = -8.0
X_HIGH = 12.0
A_EXPONENT = 0.51


def delta2_quadrature(r12: float, n: int, method: str = "reduced") -> float:
    """P(Z_1 > Z_2 > max_{i >= 3} Z_i) when only corr(Z_1, Z_2) = r12 is nonzero.

    "reduced" integrates x_1 in closed form: given Z_2 = x the chance that
    Z_1 > x is Phi(-x sqrt((1 - r)/(1 + r))), leaving a 1-D integral over x.
    "dblquad" integrates the bivariate density over x_1 > x_2 directly.
    """
    if not -1.0 < r12 < 1.0:
        raise DomainError(f"r12 must lie in (-1, 1), got {r12}")
    if n < 3:
        raise DomainError(f"n must be >= 3, got {n}")
    tol = 1e-6 / (n * (n - 1))

    if method == "reduced":
        slope = math.sqrt((1.0 - r12) / (1.0 + r12))

        def integrand(x: float) -> float:
            return math.exp(-0.5 * x * x - LOG_SQRT_2PI + log_ndtr(-x * slope)
                            + (n - 2) * log_ndtr(x))

        value, err = integrate.quad(integrand, X_LOW, X_HIGH, epsabs=tol, epsrel=1e-10, limit=400)
    elif method == "dblquad":
        det = 1.0 - r12 * r12
        log_norm = -math.log(2.0 * math.pi) - 0.5 * math.log(det)

        def density(x1: float, x2: float) -> float:
            quad_form = (x1 * x1 - 2.0 * r12 * x1 * x2 + x2 * x2) / det
            return math.exp(log_norm - 0.5 * quad_form + (n - 2) * log_ndtr(x2))

        value, err = integrate.dblquad(density, X_LOW, X_HIGH, lambda x2: x2, lambda x2: X_HIGH,
                                       epsabs=tol, epsrel=1e-8)
    else:
        raise DomainError(f"unknown method {method!r}")
    logger.debug(f"delta2 r12={r12}, n={n} ({method}): {value} (+- {err:.1e})")
    return value


def _smallest_coprime_primes(q: int) -> Tuple[int, int]:
    found: List[int] = []
    p = 1
    while len(found) < 2:
        p = int(nextprime(p))
        if q % p:
            found.append(p)
    return found[0], found[1]


def biased_tuple(q: int, k: int, n: int) -> Tuple[int, ...]:
    """(1, -1, (p1 p2)^3, ..., (p1 p2)^k, then the smallest unused units) mod q.

    p1 < p2 are the smallest primes coprime to q.
    """
    group = units(q)
    if not 2 <= k <= n <= len(group):
        raise DomainError(f"need 2 <= k <= n <= phi(q)={len(group)}, got k={k}, n={n}")
    p1, p2 = _smallest_coprime_primes(q)
    base = p1 * p2
    head = [1 % q, (-1) % q] + [pow(base, j, q) for j in range(3, k + 1)]
    seen = {}
    for pos, a in enumerate(head, start=1):
        if not is_unit(a, q):
            raise DomainError(f"a_{pos} = {a} is not a unit mod {q}")
        if a in seen:
            raise DomainError(f"construction collides mod {q}: a_{seen[a]} = a_{pos} = {a}")
        seen[a] = pos
    tail = [a for a in group if a not in seen][: n - k]
    return tuple(head + tail)


def choose_A(n: int, k: int) -> float:
    """A with e^{0.51 A^2} = n/(k log n)."""
    if n <= 1 or k < 1:
        raise DomainError("A undefined in this regime")
    ratio = n / (k * math.log(n))
    if ratio <= 1.0:
        raise DomainError(f"A undefined in this regime: n/(k log n) = {ratio:.6g} <= 1")
    return math.sqrt(math.log(ratio) / A_EXPONENT)
