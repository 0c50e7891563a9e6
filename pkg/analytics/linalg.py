"""Exact linear algebra on correlation matrices.

LU and Cholesky factorizations are the reference values; perturbative
estimates are reported as ratios against them.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple, Union

import numpy as np
from scipy import linalg
from scipy.special import log_ndtr

from model.covariance import CorrelationMatrix
from utils.errors import DomainError, SingularMatrixError
from utils.logger import setup_logger

logger = setup_logger(__name__)

LOG_2PI = math.log(2.0 * math.pi)

MatrixLike = Union[CorrelationMatrix, np.ndarray, Sequence[Sequence[float]]]


def _matrix(r: MatrixLike) -> np.ndarray:
    if isinstance(r, CorrelationMatrix):
        return r.r
    return np.asarray(r, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class NearIdentityMatrix:
    """Symmetric matrix with unit diagonal; epsilon is the largest off-diagonal |a_jk|."""
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError("near-identity matrix must be square")
        if not np.array_equal(np.diag(a), np.ones(a.shape[0])):
            raise DomainError("near-identity matrix must have unit diagonal")
        if not np.allclose(a, a.T, rtol=0.0, atol=1e-15):
            raise DomainError("near-identity matrix must be symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def epsilon(self) -> float:
        off = self.entries[~np.eye(self.n, dtype=bool)]
        return float(np.abs(off).max()) if off.size else 0.0

    def in_class(self, epsilon: float) -> bool:
        """Membership in M_n(epsilon)."""
        return self.epsilon <= epsilon

    @property
    def bounds_quotable(self) -> bool:
        return self.in_class(1.0 / (2 * self.n))


class NearIdentityReport(NamedTuple):
    det_exact: float
    inv_exact: np.ndarray
    det_bound_ratio: float
    inv_offdiag_ratios: np.ndarray


def random_near_identity(n: int, epsilon: float, rng: np.random.Generator) -> NearIdentityMatrix:
    """Member of M_n(epsilon) with off-diagonal entries uniform on [-epsilon, epsilon]."""
    upper = np.triu(rng.uniform(-epsilon, epsilon, size=(n, n)), k=1)
    return NearIdentityMatrix(upper + upper.T + np.eye(n))


def _lu(a: np.ndarray):
    lu, piv = linalg.lu_factor(a, check_finite=True)
    diag = np.diag(lu)
    if np.any(diag == 0.0) or not np.all(np.isfinite(diag)):
        raise SingularMatrixError("matrix is singular")
    return lu, piv


def near_identity_analysis(A: NearIdentityMatrix) -> NearIdentityReport:
    """Exact det and inverse by LU, and the ratios of their deviations to the perturbative sizes."""
    a = A.entries
    n = A.n
    lu, piv = _lu(a)
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    det = (-1.0) ** swaps * float(np.prod(np.diag(lu)))
    inv = linalg.lu_solve((lu, piv), np.eye(n))

    b = np.abs(a)
    np.fill_diagonal(b, 0.0)
    off_sum = float(b.sum())
    eps = A.epsilon
    det_scale = eps * off_sum
    det_ratio = abs(det - 1.0) / det_scale if det_scale > 0 else 0.0

    # |a_jk| + sum_{i != j,k} |a_ji||a_ik| + eps^2 sum_{l != m} |a_lm|
    denom = b + b @ b + eps * eps * off_sum
    numer = np.abs(inv)
    ratios = np.divide(numer, denom, out=np.zeros_like(numer), where=denom > 0)
    np.fill_diagonal(ratios, 0.0)
    return NearIdentityReport(det, inv, det_ratio, ratios)


def log_gaussian_density(C: MatrixLike, x: Sequence[float]) -> float:
    """log of (2 pi)^(-n/2) det(C)^(-1/2) exp(-x^T C^-1 x / 2), by Cholesky solves."""
    c = _matrix(C)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if c.shape != (x.size, x.size):
        raise DomainError(f"matrix {c.shape} does not match vector of length {x.size}")
    try:
        factor = linalg.cho_factor(c, lower=True, check_finite=True)
    except linalg.LinAlgError:
        raise SingularMatrixError("correlation matrix is singular or not positive definite") from None
    diag = np.diag(factor[0])
    if np.any(diag <= 0.0):
        raise SingularMatrixError("correlation matrix is singular")
    quad = float(x @ linalg.cho_solve(factor, x))
    return -0.5 * x.size * LOG_2PI - float(np.sum(np.log(diag))) - 0.5 * quad


def gaussian_density(C: MatrixLike, x: Sequence[float]) -> float:
    """Joint density of a mean-zero Gaussian vector with correlations C at x."""
    return math.exp(log_gaussian_density(C, x))


def equicorrelated_matrix(n: int, rho: float) -> np.ndarray:
    """n x n matrix with unit diagonal and every off-diagonal entry rho."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > 1 and not -1.0 / (n - 1) <= rho <= 1.0:
        raise DomainError(f"rho={rho} is not a valid correlation for n={n}")
    m = np.full((n, n), float(rho))
    np.fill_diagonal(m, 1.0)
    return m


@dataclass(frozen=True, eq=False)
class ConditioningTransform:
    """Coordinates k+1..n after removing their projection on X_1..X_k.

    V_i = X_i - sum_l u[i, l] X_l has variance v_var[i]; W_i = V_i/sqrt(v_var[i])
    has correlations residual_corr, and the event max_{i>k} X_i <= x_k given
    X_1..X_k = x becomes W_i <= w[i] for all i.
    """
    k: int
    u: np.ndarray
    v_var: np.ndarray
    w: np.ndarray
    residual_corr: np.ndarray
    r: np.ndarray

    def orthogonality_residuals(self) -> np.ndarray:
        """E V_i X_t = r[i, t] - sum_l u[i, l] r[l, t] for t <= k (should vanish)."""
        k = self.k
        return self.r[k:, :k] - self.u @ self.r[:k, :k]

    def main_term(self) -> float:
        """prod_i Phi(w_i), the value when the W_i are independent."""
        return math.exp(float(np.sum(log_ndtr(self.w)))) if self.w.size else 1.0


def _solve_block(block: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    lu, piv = _lu(block)
    return linalg.lu_solve((lu, piv), rhs)


def firstk_transform(r: MatrixLike, k: int, x: Sequence[float]) -> ConditioningTransform:
    """Condition on the first k coordinates: exact coefficients by solving against the k x k block."""
    m = _matrix(r)
    n = m.shape[0]
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
    if x.size != k:
        raise DomainError(f"expected {k} conditioning values, got {x.size}")
    if np.any(np.diff(x) > 0):
        raise DomainError("conditioning values must be nonincreasing")

    block = m[:k, :k]
    cross = m[k:, :k]
    u = _solve_block(block, cross.T).T
    v_var = 1.0 - np.einsum("il,il->i", u, cross)
    if np.any(v_var <= 0.0):
        raise SingularMatrixError("a conditioned coordinate is determined by the first k")
    w = (x[-1] - u @ x) / np.sqrt(v_var)
    resid = (m[k:, k:] - u @ cross.T) / np.sqrt(np.outer(v_var, v_var))
    resid = 0.5 * (resid + resid.T)
    np.fill_diagonal(resid, 1.0)
    return ConditioningTransform(k, u, v_var, w, resid, m)


def conditional_gaussian(r: MatrixLike, k: int, x: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of X_{k+1..n} given X_{1..k} = x."""
    m = _matrix(r)
    n = m.shape[0]
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if not 1 <= k < n or x.size != k:
        raise DomainError(f"need 1 <= k < n and {k} conditioning values")
    cross = m[k:, :k]
    u = _solve_block(m[:k, :k], cross.T).T
    cov = m[k:, k:] - u @ cross.T
    return u @ x, 0.5 * (cov + cov.T)
