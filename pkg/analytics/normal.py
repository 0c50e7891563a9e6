"""Standard normal toolkit: Phi, log Phi, and the integrals built from them.

Products of many Phi factors are accumulated as sums of log Phi.
"""
import math
from typing import Sequence, Union

import numpy as np
from scipy import integrate, special

from utils.errors import DomainError
from utils.logger import setup_logger

logger = setup_logger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
QUAD_EPS = 1e-13
QUAD_LIMIT = 400
UPPER_CUT = 40.0
NCR2_HALF_WIDTH = 14.0


def phi_cdf(x: ArrayLike):
    """Phi(x) via the complementary error function."""
    out = special.ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def log_phi_cdf(x: ArrayLike):
    """log Phi(x), accurate in both tails."""
    out = special.log_ndtr(x)
    return float(out) if np.ndim(out) == 0 else out


def phi_pdf(x: ArrayLike):
    out = np.exp(-0.5 * np.square(x) - LOG_SQRT_2PI)
    return float(out) if np.ndim(out) == 0 else out


def phi_power_integral(n: int, a: float) -> float:
    """Integral over [a, inf) of phi(t) Phi(t)^(n-1) dt = (1 - Phi(a)^n)/n."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if a == -math.inf:
        return 1.0 / n
    return -math.expm1(n * log_phi_cdf(a)) / n


def phi_power_integral_quad(n: int, a: float) -> float:
    """The same integral by adaptive quadrature (cross-check of the closed form)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    lower = max(a, -UPPER_CUT)
    if lower >= UPPER_CUT:
        return 0.0

    def integrand(t: float) -> float:
        return math.exp(-0.5 * t * t - LOG_SQRT_2PI + (n - 1) * log_phi_cdf(t))

    value, err = integrate.quad(integrand, lower, UPPER_CUT, epsabs=QUAD_EPS, epsrel=QUAD_EPS,
                                limit=QUAD_LIMIT)
    logger.debug(f"phi_power_integral quad n={n}, a={a}: {value} (+- {err:.1e})")
    return value


def ncr2_conditional_integral(n: int, epsilon: float, A: float) -> float:
    """P(max_i W_i <= A) for W_i = sqrt(eps) Z_0 + sqrt(1 - eps) Z_i, i = 1..n.

    Conditioning on Z_0 = y gives the integral of phi(y) Phi((A + sqrt(eps) y)/sqrt(1 - eps))^n.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    root_eps = math.sqrt(epsilon)
    scale = 1.0 / math.sqrt(1.0 - epsilon)

    def integrand(y: float) -> float:
        return math.exp(-0.5 * y * y - LOG_SQRT_2PI + n * log_phi_cdf((A + root_eps * y) * scale))

    # Phi(...)^n switches on near y = -A/sqrt(eps)
    points = {0.0}
    if abs(A / root_eps) < NCR2_HALF_WIDTH:
        points.add(-A / root_eps)
    value, _ = integrate.quad(integrand, -NCR2_HALF_WIDTH, NCR2_HALF_WIDTH, epsabs=1e-12,
                              epsrel=1e-12, limit=QUAD_LIMIT, points=sorted(points))
    return value


def _leader_log_terms(r1: ArrayLike) -> np.ndarray:
    r1 = np.atleast_1d(np.asarray(r1, dtype=np.float64))
    if np.any(np.abs(r1) >= 1.0):
        raise DomainError("correlations r_1i must satisfy |r| < 1")
    return np.sqrt((1.0 - r1) / (1.0 + r1))


def leader_conditional_product(r1: ArrayLike, x: float) -> float:
    """prod_i Phi(x sqrt((1 - r_1i)/(1 + r_1i))), the leader probability given X_1 = x.

    Exact when r_ij = r_1i r_1j (the residual variables are then independent).
    """
    factors = _leader_log_terms(r1)
    if factors.size == 0:
        return 1.0
    return math.exp(float(np.sum(special.log_ndtr(x * factors))))


def leader_probability(r1: ArrayLike, lower: float = -math.inf) -> float:
    """Integral over [lower, inf) of phi(x) times the conditional product."""
    factors = _leader_log_terms(r1)
    start = max(lower, -UPPER_CUT)

    def integrand(x: float) -> float:
        return math.exp(-0.5 * x * x - LOG_SQRT_2PI + float(np.sum(special.log_ndtr(x * factors))))

    value, _ = integrate.quad(integrand, start, UPPER_CUT, epsabs=QUAD_EPS, epsrel=1e-12,
                              limit=QUAD_LIMIT)
    return value


def leader_cutoff(n: int, delta: float = 1e-3) -> float:
    """sqrt((2 - delta) log n), below which leading is already unlikely."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    return math.sqrt((2.0 - delta) * math.log(n))
