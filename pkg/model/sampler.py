"""Monte Carlo estimates of ordering probabilities under the X and Z models."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from arithmetic.characters import CharacterTable
from config.settings import settings
from model.covariance import CorrelationMatrix, ShiftVector, shift_vector, var_q
from model.events import MODEL_X, MODEL_Z, DensityEstimate, OrderingEvent
from utils.errors import DomainError, NotPSDError
from utils.logger import setup_logger
from utils.rng import STREAM_MC, stream_generator
from zeros.zero_set import ZeroSet

logger = setup_logger(__name__)

MIN_SAMPLES = settings.MC_MIN_SAMPLES
JITTER_LADDER = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8)
PIVOT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Factorization:
    """Lower-triangular L with L L^T = C + jitter I."""
    lower: np.ndarray
    jitter: float
    method: str


def semidefinite_cholesky(c: np.ndarray, tol: float = PIVOT_TOL) -> np.ndarray:
    """Cholesky for a positive semidefinite matrix: vanishing pivots give zero columns."""
    n = c.shape[0]
    lower = np.zeros_like(c, dtype=np.float64)
    for j in range(n):
        row = lower[j, :j]
        d = c[j, j] - row @ row
        below = c[j + 1:, j] - lower[j + 1:, :j] @ row
        if d > tol:
            lower[j, j] = math.sqrt(d)
            lower[j + 1:, j] = below / lower[j, j]
        elif d < -tol or np.any(np.abs(below) > math.sqrt(tol)):
            raise NotPSDError(f"matrix is not positive semidefinite (pivot {j}: {d:.3e})")
    return lower


def factor_correlation(c: np.ndarray) -> Factorization:
    """Cholesky factor, falling back to the semidefinite factor, then to diagonal jitter."""
    c = np.asarray(c, dtype=np.float64)
    try:
        return Factorization(np.linalg.cholesky(c), 0.0, "cholesky")
    except np.linalg.LinAlgError:
        pass
    try:
        lower = semidefinite_cholesky(c)
        logger.warning("Correlation matrix is singular; using the semidefinite factor")
        return Factorization(lower, 0.0, "semidefinite")
    except NotPSDError:
        pass
    eye = np.eye(c.shape[0])
    for jitter in JITTER_LADDER:
        try:
            lower = np.linalg.cholesky(c + jitter * eye)
            logger.warning(f"Cholesky needed diagonal jitter {jitter:g}")
            return Factorization(lower, jitter, "jitter")
        except np.linalg.LinAlgError:
            continue
    raise NotPSDError(f"not PSD: Cholesky failed with jitter up to {JITTER_LADDER[-1]:g}")


def _as_matrix(r: Union[CorrelationMatrix, np.ndarray]) -> np.ndarray:
    return r.r if isinstance(r, CorrelationMatrix) else np.asarray(r, dtype=np.float64)


class ZModel:
    """Mean-zero Gaussian vector with the given correlations."""
    name = MODEL_Z

    def __init__(self, r: Union[CorrelationMatrix, np.ndarray]):
        self.corr = _as_matrix(r)
        self.n = self.corr.shape[0]
        self.factorization = factor_correlation(self.corr)

    @property
    def jitter(self) -> float:
        return self.factorization.jitter

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        normals = rng.standard_normal((size, self.n))
        return normals @ self.factorization.lower.T


class XModel:
    """The random model X(q, a)/sqrt(Var(q)) built from zero data.

    One uniform angle per ordinate per sample, shared by all residues. The
    per-character sums S_chi are formed once and reused for every residue.
    """
    name = MODEL_X

    def __init__(self, zs: ZeroSet, table: CharacterTable, residues: Sequence[int],
                 include_shifts: bool = True, shifts: Optional[ShiftVector] = None,
                 variance: Optional[float] = None):
        self.q = zs.modulus
        self.residues = tuple(int(a) for a in residues)
        self.n = len(self.residues)
        self.variance = var_q(zs) if variance is None else float(variance)
        self.include_shifts = include_shifts
        self.shifts = shifts or shift_vector(self.q, self.residues)

        self.amplitudes = np.concatenate([b.amplitudes for b in zs.blocks]) if zs.blocks \
            else np.zeros(0)
        sizes = [len(b) for b in zs.blocks]
        self.offsets = np.concatenate(([0], np.cumsum(sizes)[:-1])).astype(np.int64) if sizes \
            else np.zeros(0, dtype=np.int64)
        values = table.value_matrix(zs.conrey_indices, list(self.residues))
        self.v_re = 2.0 * values.real
        self.v_im = 2.0 * values.imag
        self.scale = 1.0 / math.sqrt(self.variance)
        self.mean = -self.shifts.as_array() * self.scale if include_shifts else np.zeros(self.n)
        self.total_zeros = int(self.amplitudes.size)

    def batch_rows(self) -> int:
        return max(1, settings.MC_BATCH_ELEMENTS // max(self.total_zeros, 1))

    def _draw_batch(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.total_zeros == 0:
            return np.broadcast_to(self.mean, (size, self.n)).copy()
        angles = rng.random((size, self.total_zeros)) * (2.0 * math.pi)
        s_re = np.add.reduceat(np.cos(angles) * self.amplitudes, self.offsets, axis=1)
        s_im = np.add.reduceat(np.sin(angles) * self.amplitudes, self.offsets, axis=1)
        # Re(2 chi(a) S) = 2 Re(chi) Re(S) - 2 Im(chi) Im(S)
        return self.mean + (s_re @ self.v_re - s_im @ self.v_im) * self.scale

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        step = self.batch_rows()
        parts = [self._draw_batch(rng, min(step, size - start)) for start in range(0, size, step)]
        return np.concatenate(parts, axis=0) if parts else np.zeros((0, self.n))


Model = Union[XModel, ZModel]


def sample_x_vector(zs: ZeroSet, table: CharacterTable, shifts: ShiftVector, variance: float,
                    rng: np.random.Generator, size: Optional[int] = None,
                    include_shifts: bool = True) -> np.ndarray:
    """(X(q, a_j)/sqrt(Var(q)))_j for the residues of shifts; shape (n,) or (size, n)."""
    model = XModel(zs, table, shifts.residues, include_shifts, shifts, variance)
    draws = model.draw(rng, 1 if size is None else size)
    return draws[0] if size is None else draws


def sample_z_vector(r: Union[CorrelationMatrix, np.ndarray], rng: np.random.Generator,
                    size: Optional[int] = None) -> np.ndarray:
    """Gaussian vector with correlations r; shape (n,) or (size, n)."""
    draws = ZModel(r).draw(rng, 1 if size is None else size)
    return draws[0] if size is None else draws


def sample_equicorrelated(n: int, epsilon: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """W_i = sqrt(eps) Z_0 + sqrt(1 - eps) Z_i, all pairwise correlations eps."""
    if not 0.0 <= epsilon <= 1.0:
        raise DomainError(f"epsilon must lie in [0, 1], got {epsilon}")
    z0 = rng.standard_normal(size)
    z = rng.standard_normal((size, n))
    return math.sqrt(epsilon) * z0[:, None] + math.sqrt(1.0 - epsilon) * z


def _chunk_counts(model: Model, events: Sequence[OrderingEvent], seed: int, chunk: int,
                  size: int) -> List[Tuple[int, int]]:
    rng = stream_generator(seed, STREAM_MC, chunk)
    draws = model.draw(rng, size)
    counts = []
    for event in events:
        hits, ties = event.evaluate(draws)
        counts.append((int(np.count_nonzero(hits)), int(np.count_nonzero(ties))))
    return counts


def mc_event_probabilities(model: Model, events: Sequence[OrderingEvent], samples: int,
                           seed: int, workers: int = 1, chunk_size: Optional[int] = None,
                           bounds: Optional[Sequence[Optional[float]]] = None) -> List[DensityEstimate]:
    """Estimate several events on one sample stream.

    Samples are split into fixed chunks; chunk i draws from the stream keyed by
    (seed, i), so the counts do not depend on the number of workers.
    """
    if samples < MIN_SAMPLES:
        raise DomainError(f"samples must be >= {MIN_SAMPLES}, got {samples}")
    for event in events:
        if event.n != model.n:
            raise DomainError(f"event {event.label} is over {event.n} contestants, model has {model.n}")
    chunk_size = chunk_size or settings.MC_CHUNK_SIZE
    chunks = [(i, min(chunk_size, samples - start))
              for i, start in enumerate(range(0, samples, chunk_size))]
    logger.info(f"Monte Carlo: model={model.name}, n={model.n}, samples={samples}, "
                f"chunks={len(chunks)}, workers={workers}")

    def run(chunk: Tuple[int, int]) -> List[Tuple[int, int]]:
        return _chunk_counts(model, events, seed, *chunk)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_chunk = list(pool.map(run, chunks))
    else:
        per_chunk = [run(c) for c in chunks]

    estimates = []
    for e_idx, event in enumerate(events):
        hits = sum(c[e_idx][0] for c in per_chunk)
        ties = sum(c[e_idx][1] for c in per_chunk)
        if ties:
            logger.warning(f"{ties} tied samples for {event.label}; counted as failures")
        bound = bounds[e_idx] if bounds is not None else None
        estimates.append(DensityEstimate.from_counts(hits, ties, samples, model.name, event, bound))
    return estimates


def mc_event_probability(model: Model, event: OrderingEvent, samples: int, seed: int,
                         workers: int = 1) -> DensityEstimate:
    """Fraction of samples on which the event's strict inequalities all hold."""
    return mc_event_probabilities(model, [event], samples, seed, workers)[0]
