"""Segmented prime sieve and exact prime race statistics.

Prime counts are step functions that only change at primes, so the
logarithmic measure of {t in [2, X] : event holds} is a finite sum of
log(p_{i+1}/p_i) over the inter-prime intervals where the event holds.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config.guards import cost_guards
from config.settings import settings
from model.events import OrderingEvent
from utils.arith import euler_phi, prime_sieve, require_unit
from utils.errors import DomainError
from utils.helpers import compensated_sum, format_number
from utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class RaceCounters:
    """pi(x; q, a_j) for the tracked residues and pi(x), after the prime x."""
    q: int
    residues: Tuple[int, ...]
    x: int
    counts: Tuple[int, ...]
    total: int


@dataclass(frozen=True)
class LogDensityResult:
    event: OrderingEvent
    X: int
    measure: float
    density: float
    logx_density: float
    boundary_count: int
    tie_measure: float


def _sieve_segment(low: int, high: int, base: np.ndarray) -> np.ndarray:
    """Primes in [low, high), odd numbers only plus 2."""
    first = low if low % 2 else low + 1
    size = (high - first + 1) // 2
    if size <= 0:
        return np.array([2], dtype=np.int64) if low <= 2 < high else np.zeros(0, dtype=np.int64)
    is_prime = np.ones(size, dtype=bool)
    if first == 1:
        is_prime[0] = False
    for p in base[base * base < high].tolist():
        start = max(p * p, (first + p - 1) // p * p)
        if start % 2 == 0:
            start += p
        if start < high:
            is_prime[(start - first) // 2::p] = False
    primes = first + 2 * np.flatnonzero(is_prime).astype(np.int64)
    if low <= 2 < high:
        primes = np.concatenate((np.array([2], dtype=np.int64), primes))
    return primes


def prime_segments(X: int, segment_size: Optional[int] = None,
                   workers: int = 1) -> Iterator[np.ndarray]:
    """Arrays of the primes <= X, segment by segment in increasing order."""
    cost_guards.check_sieve_limit(X)
    if X < 2:
        return
    segment_size = segment_size or settings.SIEVE_SEGMENT_SIZE
    base = prime_sieve(math.isqrt(X))
    base = base[base > 2]
    bounds = [(lo, min(lo + segment_size, X + 1)) for lo in range(2, X + 1, segment_size)]
    logger.debug(f"Sieving to {X}: {len(bounds)} segments, {base.size} base primes")

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # windows of `workers` segments keep memory bounded; map keeps the order
            for start in range(0, len(bounds), workers):
                window = bounds[start:start + workers]
                for primes in pool.map(lambda b: _sieve_segment(b[0], b[1], base), window):
                    yield primes
    else:
        for lo, hi in bounds:
            yield _sieve_segment(lo, hi, base)


def _check_residues(q: int, residues: Sequence[int]) -> np.ndarray:
    if q < 1:
        raise DomainError(f"modulus must be positive, got {q}")
    reduced = [require_unit(a, q) for a in residues]
    if len(set(reduced)) != len(reduced):
        raise DomainError(f"residues must be distinct mod {q}: {list(residues)}")
    if not reduced:
        raise DomainError("at least one residue is required")
    return np.asarray(reduced, dtype=np.int64)


def _race_segments(q: int, residues: Sequence[int], X: int, segment_size: Optional[int] = None,
                   workers: int = 1) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """(primes, counts after each prime (m, n), totals after each prime) per segment."""
    tracked = _check_residues(q, residues)
    offset = np.zeros(tracked.size, dtype=np.int64)
    total = 0
    for primes in prime_segments(X, segment_size, workers):
        if primes.size == 0:
            continue
        hits = (primes % q)[:, None] == tracked[None, :]
        counts = np.cumsum(hits, axis=0, dtype=np.int64) + offset
        totals = total + np.arange(1, primes.size + 1, dtype=np.int64)
        offset = counts[-1].copy()
        total = int(totals[-1])
        yield primes, counts, totals


def race_counts(q: int, residues: Sequence[int], X: int, segment_size: Optional[int] = None,
                workers: int = 1) -> Iterator[Tuple[int, RaceCounters]]:
    """Every prime p <= X with the counters just after it."""
    res = tuple(int(a) for a in residues)
    for primes, counts, totals in _race_segments(q, res, X, segment_size, workers):
        for p, row, tot in zip(primes.tolist(), counts.tolist(), totals.tolist()):
            yield p, RaceCounters(q, res, p, tuple(row), tot)


def final_counts(q: int, residues: Sequence[int], X: int, segment_size: Optional[int] = None,
                 workers: int = 1) -> RaceCounters:
    """Counters at x = X (pi is constant from the last prime to X)."""
    res = tuple(int(a) for a in residues)
    counts = (0,) * len(res)
    total = 0
    _check_residues(q, res)
    for _, seg_counts, totals in _race_segments(q, res, X, segment_size, workers):
        counts = tuple(int(c) for c in seg_counts[-1])
        total = int(totals[-1])
    return RaceCounters(q, res, X, counts, total)


def count_classes(q: int, X: int, segment_size: Optional[int] = None, workers: int = 1) -> np.ndarray:
    """pi(X; q, a) for every a = 0..q-1."""
    out = np.zeros(q, dtype=np.int64)
    for primes in prime_segments(X, segment_size, workers):
        out += np.bincount(primes % q, minlength=q)
    return out


def error_vector(counters: RaceCounters) -> Tuple[float, ...]:
    """E(x; q, a) = (log x / sqrt x)(phi(q) pi(x; q, a) - pi(x)) per tracked residue."""
    x = counters.x
    if x < 2:
        raise DomainError(f"error vector needs x >= 2, got {x}")
    scale = math.log(x) / math.sqrt(x)
    phi = euler_phi(counters.q)
    return tuple(scale * (phi * c - counters.total) for c in counters.counts)


def error_vector_stream(q: int, residues: Sequence[int], X: int, segment_size: Optional[int] = None,
                        workers: int = 1) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Per segment: primes p, pi(p), pi(p; q, a_j) and E(p; q, a_j) just after each prime."""
    phi = euler_phi(q)
    for primes, counts, totals in _race_segments(q, residues, X, segment_size, workers):
        x = primes.astype(np.float64)
        scale = np.log(x) / np.sqrt(x)
        errors = scale[:, None] * (phi * counts - totals[:, None]).astype(np.float64)
        yield primes, totals, counts, errors


def _any_tie(states: np.ndarray) -> np.ndarray:
    if states.shape[1] < 2:
        return np.zeros(states.shape[0], dtype=bool)
    ordered = np.sort(states, axis=1)
    return np.any(ordered[:, 1:] == ordered[:, :-1], axis=1)


def exact_log_density(q: int, residues: Sequence[int], event: OrderingEvent, X: int,
                      segment_size: Optional[int] = None, workers: int = 1) -> LogDensityResult:
    """Exact logarithmic measure of the event over [2, X].

    tie_measure is the measure of the t where two tracked counts are equal.
    """
    if X < 2:
        raise DomainError(f"X must be >= 2, got {X}")
    if event.n != len(residues):
        raise DomainError(f"event {event.label} is over {event.n} contestants, got {len(residues)} residues")

    measure_parts: List[float] = []
    tie_parts: List[float] = []
    switches = 0
    last_state: Optional[bool] = None
    prev_p: Optional[int] = None
    prev_counts: Optional[np.ndarray] = None

    def integrate(starts: np.ndarray, ends: np.ndarray, states: np.ndarray) -> None:
        nonlocal switches, last_state
        keep = ends > starts
        starts, ends, states = starts[keep], ends[keep], states[keep]
        if starts.size == 0:
            return
        hits, _ = event.evaluate(states)
        lengths = np.log1p((ends - starts) / starts.astype(np.float64))
        measure_parts.append(compensated_sum(lengths[hits]))
        tie_parts.append(compensated_sum(lengths[_any_tie(states)]))
        flips = int(np.count_nonzero(hits[1:] != hits[:-1]))
        if last_state is not None and bool(hits[0]) != last_state:
            flips += 1
        switches += flips
        last_state = bool(hits[-1])

    for primes, counts, _ in _race_segments(q, residues, X, segment_size, workers):
        if prev_p is None:
            integrate(primes[:-1], primes[1:], counts[:-1])
        else:
            integrate(np.concatenate(([prev_p], primes[:-1])), primes,
                      np.vstack((prev_counts, counts[:-1])))
        prev_p, prev_counts = int(primes[-1]), counts[-1][None, :]
    if prev_p is not None:
        integrate(np.array([prev_p]), np.array([X]), prev_counts)

    measure = compensated_sum(measure_parts)
    span = math.log(X) - math.log(2.0)
    density = measure / span if span > 0 else 0.0
    result = LogDensityResult(event, X, measure, density, measure / math.log(X),
                              switches, compensated_sum(tie_parts))
    logger.info(f"Log density q={q} {event.label} X={X}: measure={measure:.6g}, density={density:.6g}")
    return result


def write_trace(stream: IO[str], q: int, residues: Sequence[int], X: int, workers: int = 1) -> int:
    """Per-prime trace lines 'p,pi(p),count_1,...,count_n,E_1,...,E_n'; returns the number of primes."""
    res = tuple(int(a) for a in residues)
    stream.write(",".join(["p", "pi"] + [f"pi_{a}" for a in res] + [f"E_{a}" for a in res]) + "\n")
    lines = 0
    for primes, totals, counts, errors in error_vector_stream(q, res, X, workers=workers):
        rows = []
        for p, total, row, err in zip(primes.tolist(), totals.tolist(), counts.tolist(),
                                      errors.tolist()):
            rows.append(",".join([str(p), str(total)] + [str(c) for c in row]
                                 + [format_number(e) for e in err]))
        stream.write("\n".join(rows) + "\n")
        lines += primes.size
    return lines
