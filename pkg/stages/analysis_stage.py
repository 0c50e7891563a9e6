"""Direct (non-graph) subcommands: zeros, sieve, predict, check and harmonic.

Every method takes the resolved ExperimentConfig and returns
(rows, columns, notes) for the writers.
"""
import gzip
import math
from typing import Any, Dict, List, Optional, TextIO, Tuple

import numpy as np

from analytics.bias import choose_A, delta2_quadrature, A_EXPONENT
from analytics.bounds import BoundKind, bound_value
from analytics.linalg import equicorrelated_matrix, near_identity_analysis, random_near_identity
from analytics.normal import (leader_probability, ncr2_conditional_integral, phi_power_integral,
                              phi_power_integral_quad)
from arithmetic.harmonic import g_function, pair_sum_report, spaced_grid
from arithmetic.sieve import exact_log_density, write_trace
from config.experiment import ExperimentConfig
from model.covariance import (bq, correlation_average_report, correlation_matrix,
                              large_cov_ratio, var_q)
from model.events import OrderingEvent
from model.sampler import ZModel, mc_event_probability, sample_equicorrelated
from stages.sampler_stage import resolve_events
from stages.zero_stage import resolve_residues
from ui.writers import REPORT_COLUMNS, report_object
from utils.arith import euler_phi, require_unit
from utils.errors import DomainError, MissingParameterError
from utils.helpers import index_subset, max_abs
from utils.logger import setup_logger
from utils.rng import STREAM_CHECKS, stream_generator
from zeros.zero_file import serialize_zero_set
from zeros.zero_store import zero_store

logger = setup_logger(__name__)

Table = Tuple[List[Dict[str, Any]], List[str], List[str]]

SIEVE_COLUMNS = ["q", "event", "X", "measure", "density", "boundary_count", "logx_density",
                 "tie_measure"]
HARMONIC_COLUMNS = ["sum", "paper_form", "ratio"]
G_COLUMNS = ["theta", "Q", "x", "G"]
ZERO_SUMMARY_COLUMNS = ["modulus", "blocks", "complete", "truncation_count", "max_height",
                        "var_q", "provenance"]


def _require(config: ExperimentConfig, *names: str) -> None:
    for name in names:
        if getattr(config, name) is None:
            raise MissingParameterError(f"--{name.replace('_', '-')} is required")


def _main_term(kind: BoundKind, config: ExperimentConfig) -> Optional[float]:
    """The probability the error term is measured against."""
    n = config.n
    if n is None:
        return None
    if kind in (BoundKind.PROB_LEADER, BoundKind.LEADER_ERROR):
        return 1.0 / n
    if kind == BoundKind.FULL_RACE_ERROR:
        return 1.0 / math.factorial(n)
    if kind == BoundKind.FIRST_K_ERROR and config.k is not None and 1 <= config.k <= n:
        return 1.0 / math.perm(n, config.k)
    return None


def _bound_params(kind: BoundKind, config: ExperimentConfig) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for name in ("n", "q", "k", "r1_sum", "rij_sum", "epsilon", "epsilon1", "A", "B", "theta"):
        value = getattr(config, name)
        if value is not None:
            params[name] = value
    if kind in (BoundKind.LI_SHAO, BoundKind.HYBRID):
        _require(config, "thresholds", "rho")
        u = np.asarray(config.thresholds, dtype=np.float64)
        correlated = equicorrelated_matrix(u.size, config.rho)
        if kind == BoundKind.LI_SHAO:
            params.update(u=u, rx=correlated, rw=np.eye(u.size))
        else:
            params.update(thresholds=u, rho=correlated)
    return params


class AnalysisStage:
    """Subcommands that run without the cov/mc pipeline."""

    def zeros(self, config: ExperimentConfig, stream: TextIO) -> Optional[Table]:
        """Validate a zero file (summary row) or write a synthesized/built-in one."""
        if config.zero_file:
            zs = zero_store.load_file(config.zero_file)
            row = dict(zs.summary())
            row["var_q"] = var_q(zs)
            logger.info(f"Validated zero file {config.zero_file}")
            return [row], ZERO_SUMMARY_COLUMNS, []

        _require(config, "q")
        if config.builtin:
            zs = zero_store.load_builtin(config.q)
        else:
            zs = zero_store.synthesize(config.q, config.synthetic_count, config.seed, config.workers)
        for line in config.header_lines():
            stream.write(line + "\n")
        serialize_zero_set(zs, stream)
        logger.info(f"Wrote zero set q={zs.modulus}: {zs.truncation_count} ordinates")
        return None

    def sieve(self, config: ExperimentConfig) -> Table:
        """Exact logarithmic densities of every requested event over [2, X]."""
        X = config.sieve_limit()
        residues = resolve_residues(config)
        events = resolve_events(config.events, len(residues))
        notes: List[str] = []

        if config.trace:
            with gzip.open(config.trace, "wt", encoding="utf-8") as f:
                lines = write_trace(f, config.q, residues, X, config.workers)
            notes.append(f"trace: {lines} primes written to {config.trace}")

        rows = []
        for event in events:
            result = exact_log_density(config.q, residues, event, X, workers=config.workers)
            rows.append({
                "q": config.q,
                "event": event.label,
                "X": X,
                "measure": result.measure,
                "density": result.density,
                "boundary_count": result.boundary_count,
                "logx_density": result.logx_density,
                "tie_measure": result.tie_measure,
            })
        return rows, SIEVE_COLUMNS, notes

    def predict(self, config: ExperimentConfig) -> Table:
        """One bound evaluation, reported against the main term it corrects."""
        _require(config, "kind")
        try:
            kind = BoundKind(config.kind.lower())
        except ValueError:
            raise DomainError(f"--kind must be one of {[k.value for k in BoundKind]}") from None
        report = bound_value(kind, _bound_params(kind, config), config.constant_c)
        inputs = {k: v for k, v in report.inputs.items() if not isinstance(v, np.ndarray)}
        inputs["constant_c"] = report.constant_c
        if report.shape_only:
            inputs["label"] = report.label
        obj = report_object(kind.value, inputs, report.value, _main_term(kind, config))
        return [obj], REPORT_COLUMNS, []

    def check(self, config: ExperimentConfig) -> Table:
        """Evaluate one quantity against its independent oracle."""
        _require(config, "check")
        name = config.check.lower().replace("-", "_")
        handler = getattr(self, f"_check_{name}", None)
        if handler is None:
            raise DomainError(f"unknown --check {config.check!r}; choose from {CHECKS}")
        logger.info(f"Running check {name}")
        return handler(config), REPORT_COLUMNS, []

    def harmonic(self, config: ExperimentConfig) -> Table:
        """G(theta) at one point, or the pair sum over two equally spaced grids."""
        _require(config, "Q", "x")
        if config.theta_point is not None:
            value = g_function(config.theta_point, config.Q, config.x)
            return [{"theta": config.theta_point, "Q": config.Q, "x": config.x, "G": value}], G_COLUMNS, []
        _require(config, "R", "S")
        thetas = spaced_grid(config.R, config.x)
        phis = spaced_grid(config.S, config.x, config.offset)
        report = pair_sum_report(thetas, phis, config.Q, config.x)
        return [report._asdict()], HARMONIC_COLUMNS, []

    # checks

    def _check_phi_power(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        _require(config, "n", "a")
        value = phi_power_integral(config.n, config.a)
        oracle = phi_power_integral_quad(config.n, config.a)
        return [report_object("phi_power", {"n": config.n, "a": config.a}, value, oracle)]

    def _check_ncr2(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        _require(config, "n", "epsilon", "A")
        value = ncr2_conditional_integral(config.n, config.epsilon, config.A)
        rng = stream_generator(config.seed, STREAM_CHECKS, 0)
        draws = sample_equicorrelated(config.n, config.epsilon, rng, config.samples)
        oracle = float(np.mean(draws.max(axis=1) <= config.A))
        inputs = {"n": config.n, "epsilon": config.epsilon, "A": config.A, "samples": config.samples}
        return [report_object("ncr2", inputs, value, oracle)]

    def _check_leader(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        """Product-structured leader probability against a Z-model estimate."""
        _require(config, "n", "rho")
        n, rho = config.n, config.rho
        value = leader_probability([rho] * (n - 1))
        r = np.full((n, n), rho * rho)
        r[0, :] = r[:, 0] = rho
        np.fill_diagonal(r, 1.0)
        estimate = mc_event_probability(ZModel(r), OrderingEvent.leader(0, n), config.samples,
                                        config.seed, config.workers)
        inputs = {"n": n, "rho": rho, "samples": config.samples, "stderr": estimate.stderr}
        return [report_object("leader", inputs, value, estimate.value)]

    def _check_near_identity(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        _require(config, "n")
        n = config.n
        eps = config.epsilon if config.epsilon is not None else 1.0 / (2 * n)
        rng = stream_generator(config.seed, STREAM_CHECKS, 1)
        det_ratios, inv_ratios, residuals = [], [], []
        for _ in range(config.trials):
            A = random_near_identity(n, eps, rng)
            report = near_identity_analysis(A)
            det_ratios.append(report.det_bound_ratio)
            inv_ratios.append(float(report.inv_offdiag_ratios.max()))
            residuals.append(float(np.abs(A.entries @ report.inv_exact - np.eye(n)).max()))
        inputs = {"n": n, "epsilon": eps, "trials": config.trials}
        return [
            report_object("near_identity_det", inputs, max_abs(det_ratios)),
            report_object("near_identity_inv", inputs, max_abs(inv_ratios)),
            report_object("near_identity_lu_residual", inputs, max_abs(residuals)),
        ]

    def _check_delta2(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        """First-two ordering density against the unbiased (n-2)!/n!."""
        _require(config, "n", "r12")
        value = delta2_quadrature(config.r12, config.n)
        oracle = 1.0 / (config.n * (config.n - 1))
        return [report_object("delta2", {"n": config.n, "r12": config.r12}, value, oracle)]

    def _check_delta2_dblquad(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        _require(config, "n", "r12")
        value = delta2_quadrature(config.r12, config.n)
        oracle = delta2_quadrature(config.r12, config.n, method="dblquad")
        return [report_object("delta2_dblquad", {"n": config.n, "r12": config.r12}, value, oracle)]

    def _check_choose_a(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        _require(config, "n", "k")
        A = choose_A(config.n, config.k)
        value = math.exp(A_EXPONENT * A * A)
        oracle = config.n / (config.k * math.log(config.n))
        return [report_object("choose_a", {"n": config.n, "k": config.k, "A": A}, value, oracle)]

    def _check_large_cov(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        """B_q(a, -a) against -(log 2) phi(q)."""
        _require(config, "q")
        q = config.q
        a = require_unit(config.residues[0], q, "--residues") if config.residues else 1
        zs = zero_store.get_zeros(q, config.zero_file, config.synthetic_count, config.seed,
                                  config.workers)
        value = bq(zs, zero_store.character_table(q), a, (-a) % q)
        inputs = {"q": q, "a": a, "truncation_count": zs.truncation_count,
                  "provenance": zs.provenance.describe(), "ratio_check": large_cov_ratio(q, value)}
        return [report_object("large_cov", inputs, value, -math.log(2.0) * euler_phi(q))]

    def _check_correlation_average(self, config: ExperimentConfig) -> List[Dict[str, Any]]:
        """Sum of |r_ij| over I x J against its stated size."""
        residues = resolve_residues(config)
        q = config.q
        zs = zero_store.get_zeros(q, config.zero_file, config.synthetic_count, config.seed,
                                  config.workers)
        cm = correlation_matrix(zs, zero_store.character_table(q), residues, config.workers)
        n = len(residues)
        I = index_subset(config.subset_i, n) if config.subset_i else list(range(n))
        J = index_subset(config.subset_j, n) if config.subset_j else list(range(n))
        report = correlation_average_report(cm, I, J)
        inputs = {"q": q, "residues": residues, "I": [i + 1 for i in I], "J": [j + 1 for j in J],
                  "truncation_count": zs.truncation_count}
        return [report_object("correlation_average", inputs, report.sum, report.paper_form)]


CHECKS = sorted(name[len("_check_"):] for name in dir(AnalysisStage) if name.startswith("_check_"))

analysis_stage = AnalysisStage()
