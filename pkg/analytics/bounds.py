"""Error-term evaluators with every implicit constant surfaced as constant_c.

Every value is an absolute error on a probability: the relative error factor
of each estimate is multiplied by its main term (n - k)!/n!. The `bound` column of
Monte Carlo output and the `value` of predict reports use this convention, so
a predict `ratio` is the absolute error divided by the main term.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Mapping

import numpy as np
from scipy.special import log_ndtr

from utils.arith import euler_phi
from utils.errors import DomainError, MissingParameterError
from utils.logger import setup_logger

logger = setup_logger(__name__)


class BoundKind(str, Enum):
    PROB_LEADER = "probleader"
    FULL_RACE_ERROR = "fullrace"
    LEADER_ERROR = "leader"
    FIRST_K_ERROR = "firstk"
    NCR2 = "ncr2"
    LI_SHAO = "lishao"
    HYBRID = "hybrid"


SHAPE_ONLY = {BoundKind.HYBRID}


@dataclass(frozen=True)
class BoundReport:
    kind: BoundKind
    inputs: Dict[str, Any]
    value: float
    constant_c: float = 1.0
    shape_only: bool = False
    label: str = field(default="")


_MISSING = object()


def _param(params: Mapping[str, Any], name: str, default: Any = _MISSING) -> Any:
    value = params.get(name, default)
    if value is _MISSING or value is None:
        raise MissingParameterError(f"missing parameter '{name}'")
    return value


def _log_q(params: Mapping[str, Any]) -> float:
    if params.get("log_q") is not None:
        return float(params["log_q"])
    q = params.get("q")
    if q is None:
        raise MissingParameterError("missing parameter 'q' (or 'log_q')")
    return math.log(float(q))


def _phi_q(params: Mapping[str, Any]) -> float:
    if params.get("phi_q") is not None:
        return float(params["phi_q"])
    q = params.get("q")
    if q is None:
        raise MissingParameterError("missing parameter 'q' (or 'phi_q')")
    return float(euler_phi(int(q)))


def _prob_leader(p: Mapping[str, Any]) -> float:
    """|P(leader) - 1/n| directly; this expression is already absolute."""
    n = float(_param(p, "n"))
    return n ** -100 + n ** -1.99 * float(_param(p, "r1_sum")) + n ** -2.99 * float(_param(p, "rij_sum"))


def _full_race(p: Mapping[str, Any]) -> float:
    """(1/n!) n log^4 n / log q."""
    n = int(_param(p, "n"))
    main = 1.0 / math.factorial(n)
    return main * n * math.log(n) ** 4 / _log_q(p)


def _leader(p: Mapping[str, Any]) -> float:
    """Relative factor n^4/phi(q)^(1/8) + (n log q)^(-12/25) times the main term 1/n."""
    n = float(_param(p, "n"))
    return (n ** 4 / _phi_q(p) ** 0.125 + (n * _log_q(p)) ** (-12.0 / 25.0)) / n


def _first_k(p: Mapping[str, Any]) -> float:
    n = int(_param(p, "n"))
    k = int(_param(p, "k"))
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    log_q = _log_q(p)
    main = 1.0 / math.perm(n, k)
    return main * (k * math.log(k) ** 6 * math.log(n) / log_q + 1.0 / (n * log_q ** 0.1))


def _ncr2(p: Mapping[str, Any]) -> float:
    n = float(_param(p, "n"))
    eps = float(_param(p, "epsilon"))
    a = float(_param(p, "A"))
    b = float(_param(p, "B"))
    theta = float(p.get("theta", 1.0))
    if eps <= 0 or b <= 0 or a + b <= 0:
        raise DomainError("NCR2 needs epsilon > 0, B > 0 and A + B > 0")
    inner = n * math.exp(-a * a / 2.0 + eps * a * a + a * b + b * b) / (a + b)
    return math.exp(-theta * inner) + math.exp(-b * b / eps)


def _li_shao(p: Mapping[str, Any]) -> float:
    u = np.asarray(_param(p, "u"), dtype=np.float64)
    rx = np.asarray(_param(p, "rx"), dtype=np.float64)
    rw = np.asarray(_param(p, "rw"), dtype=np.float64)
    n = u.size
    if rx.shape != (n, n) or rw.shape != (n, n):
        raise DomainError("rx and rw must be n x n for n thresholds")
    iu, ju = np.triu_indices(n, k=1)
    x_ij, w_ij = rx[iu, ju], rw[iu, ju]
    rho = np.maximum(np.abs(x_ij), np.abs(w_ij))
    gap = np.where(x_ij > w_ij, np.arcsin(x_ij) - np.arcsin(w_ij), 0.0)
    decay = np.exp(-(u[iu] ** 2 + u[ju] ** 2) / (2.0 * (1.0 + rho)))
    return float(np.sum(gap * decay)) / (2.0 * math.pi)


def _hybrid(p: Mapping[str, Any]) -> float:
    w_i = np.asarray(_param(p, "thresholds"), dtype=np.float64)
    rho = np.asarray(_param(p, "rho"), dtype=np.float64)
    eps = float(_param(p, "epsilon"))
    eps1 = float(_param(p, "epsilon1"))
    theta = float(p.get("theta", 1.0))
    w = float(p.get("w", float(w_i.min()) if w_i.size else 1.0))
    prefactor = math.exp(float(np.sum(log_ndtr(w_i)))) + math.exp(-theta * (eps * w) ** 2 / (eps1 + eps ** 3))
    off = ~np.eye(w_i.size, dtype=bool)
    pair = np.abs(rho) * np.exp(-(w_i[:, None] ** 2 + w_i[None, :] ** 2) / 2.0)
    return prefactor * float(pair[off].sum())


_EVALUATORS: Dict[BoundKind, Callable[[Mapping[str, Any]], float]] = {
    BoundKind.PROB_LEADER: _prob_leader,
    BoundKind.FULL_RACE_ERROR: _full_race,
    BoundKind.LEADER_ERROR: _leader,
    BoundKind.FIRST_K_ERROR: _first_k,
    BoundKind.NCR2: _ncr2,
    BoundKind.LI_SHAO: _li_shao,
    BoundKind.HYBRID: _hybrid,
}


def bound_value(kind, params: Mapping[str, Any], constant_c: float = 1.0) -> BoundReport:
    """Evaluate the error expression of kind, each implicit constant replaced by constant_c."""
    kind = BoundKind(kind)
    if constant_c < 0:
        raise DomainError("constant_c must be nonnegative")
    value = constant_c * _EVALUATORS[kind](params)
    shape_only = kind in SHAPE_ONLY
    label = "shape only" if shape_only else ""
    logger.debug(f"bound {kind.value}: {value}")
    return BoundReport(kind, dict(params), value, constant_c, shape_only, label)
