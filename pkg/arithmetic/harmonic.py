"""G(theta): von Mangoldt-weighted count of rationals a/q (q <= Q) within 1/x of theta."""
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from utils.arith import mangoldt_table
from utils.errors import DomainError
from utils.helpers import compensated_sum
from utils.logger import setup_logger

logger = setup_logger(__name__)


class PairSumReport(NamedTuple):
    sum: float
    paper_form: float
    ratio: float


def circle_spacing(points: np.ndarray) -> float:
    """Minimum circle distance between points of [0, 1)."""
    if points.size < 2:
        return math.inf
    ordered = np.sort(points)
    gaps = np.diff(ordered)
    wrap = ordered[0] + 1.0 - ordered[-1]
    return float(min(gaps.min(), wrap))


@dataclass(frozen=True, eq=False)
class SpacedPoints:
    """Points of R/Z, pairwise at circle distance >= 1/x."""
    points: np.ndarray
    x: float

    def __post_init__(self):
        pts = np.mod(np.asarray(self.points, dtype=np.float64), 1.0)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.spacing < 1.0 / self.x:
            raise DomainError(f"points are not 1/x-spaced: spacing {self.spacing:.3g} < 1/{self.x:g}")

    @property
    def spacing(self) -> float:
        return circle_spacing(self.points)

    def __len__(self) -> int:
        return int(self.points.size)


def _check_range(Q: int, x: float) -> None:
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    if not x > 2 * Q:
        raise DomainError(f"need x > 2Q, got x={x}, Q={Q}")


def _window_counts(diffs: np.ndarray, Q: int, x: float) -> float:
    lam = mangoldt_table(Q)
    radius = 1.0 / x
    terms = []
    for q in range(2, Q + 1):
        if lam[q] == 0.0:
            continue
        scaled = diffs * q
        # nearest a/q to theta is rint(theta q)/q
        dist = np.abs(scaled - np.rint(scaled)) / q
        fired = int(np.count_nonzero(dist <= radius))
        if fired:
            terms.append(fired * lam[q] / q)
    return compensated_sum(terms)


def g_function(theta: float, Q: int, x: float) -> float:
    """Sum over q <= Q of Lambda(q)/q times #{a mod q : ||theta - a/q|| <= 1/x}."""
    _check_range(Q, x)
    return _window_counts(np.array([float(theta)]), Q, x)


def pair_sum_report(thetas: SpacedPoints, phis: SpacedPoints, Q: int, x: float) -> PairSumReport:
    """Sum of G(theta_r - phi_s) against sqrt(RS) log^2(2QRS) + RSQ/x."""
    _check_range(Q, x)
    for name, pts in (("thetas", thetas), ("phis", phis)):
        if pts.spacing < 1.0 / x:
            raise DomainError(f"spacing violation: {name} spacing {pts.spacing:.3g} < 1/{x:g}")
    diffs = (thetas.points[:, None] - phis.points[None, :]).ravel()
    total = _window_counts(diffs, Q, x)
    rs = len(thetas) * len(phis)
    paper_form = math.sqrt(rs) * math.log(2 * Q * rs) ** 2 + rs * Q / x
    logger.debug(f"pair sum R*S={rs}, Q={Q}, x={x}: {total}")
    return PairSumReport(total, paper_form, total / paper_form)


def spaced_grid(count: int, x: float, offset: float = 0.0) -> SpacedPoints:
    """Points offset + j/count, j = 0..count-1."""
    return SpacedPoints(offset + np.arange(count) / count, x)
