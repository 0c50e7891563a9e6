"""Covariance stage: correlation matrix, shift vector and the per-pair cov rows."""
from typing import Any, Dict, List

from analytics.linalg import equicorrelated_matrix
from graph.state import RaceState
from model.covariance import (CorrelationMatrix, correlation_matrix, large_cov_ratio,
                              shift_vector)
from model.events import MODEL_Z
from utils.errors import DomainError, RaceError
from utils.helpers import format_number
from utils.logger import setup_logger

logger = setup_logger(__name__)


def cov_rows(cm: CorrelationMatrix) -> List[Dict[str, Any]]:
    """One row per unordered pair (a, b), variance rows on the diagonal."""
    rows = []
    for i, a in enumerate(cm.residues):
        for j in range(i, cm.n):
            b = cm.residues[j]
            b_value = cm.b[i, j] if cm.b is not None else cm.r[i, j] * cm.var_q
            notes = []
            if i == j:
                notes.append("variance")
            elif cm.q >= 2 and (a + b) % cm.q == 0:
                notes.append(f"large_cov ratio={format_number(large_cov_ratio(cm.q, float(b_value)))}")
            if cm.partial:
                notes.append("partial")
            rows.append({
                "a": a,
                "b": b,
                "B_q": float(b_value),
                "r": float(cm.r[i, j]),
                "annotation": ";".join(notes),
            })
    return rows


class CovarianceStage:
    """Correlation matrix stage."""

    def build_matrix(self, state: RaceState) -> RaceState:
        """Build the CorrelationMatrix for the resolved residues, or the equicorrelated one for --rho."""
        config = state["config"]

        try:
            if config.rho is not None:
                if config.model != MODEL_Z:
                    raise DomainError("--rho needs --model z")
                if config.n is None:
                    raise DomainError("--rho needs --n")
                logger.info(f"Building equicorrelated matrix n={config.n}, rho={config.rho}")
                positions = tuple(range(1, config.n + 1))
                cm = CorrelationMatrix(0, positions, 1.0, equicorrelated_matrix(config.n, config.rho))
                state["residues"] = list(positions)
                state["shifts"] = None
            else:
                zs = state["zero_set"]
                residues = state["residues"]
                logger.info(f"Building correlation matrix for q={zs.modulus}, residues={residues}")
                cm = correlation_matrix(zs, state["table"], residues, workers=config.workers)
                state["shifts"] = shift_vector(zs.modulus, residues)
                state["notes"] = state.get("notes", []) + [f"truncation_count: {zs.truncation_count}"]

            state["correlation"] = cm
            state["rows"] = cov_rows(cm)
            state["step"] = "covariance_built"

            logger.info(f"Correlation matrix ready: n={cm.n}, min eigenvalue {cm.min_eigenvalue:.3e}")

        except (RaceError, ValueError) as e:
            logger.error(f"Covariance error: {str(e)}")
            state["error"] = str(e)
            state["step"] = "error"

        return state


covariance_stage = CovarianceStage()
