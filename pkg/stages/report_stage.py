"""Report stage: the row dicts behind the cov and mc outputs."""
from typing import Any, Dict, List

from graph.state import RaceState
from model.events import DensityEstimate
from utils.logger import setup_logger

logger = setup_logger(__name__)

MC_COLUMNS = ["model", "event", "n", "k", "samples", "value", "stderr", "prediction", "bound", "ties"]
COV_COLUMNS = ["a", "b", "B_q", "r", "annotation"]


def estimate_row(estimate: DensityEstimate) -> Dict[str, Any]:
    return {
        "model": estimate.model,
        "event": estimate.event.label,
        "n": estimate.event.n,
        "k": estimate.event.k,
        "samples": estimate.samples,
        "value": estimate.value,
        "stderr": estimate.stderr,
        "prediction": estimate.prediction,
        "bound": estimate.bound,
        "ties": estimate.ties,
    }


class ReportStage:
    """Row formatting stage."""

    def format_rows(self, state: RaceState) -> RaceState:
        """Turn the estimates (mc) or keep the pair rows (cov) as output rows."""
        config = state["config"]
        logger.info(f"Formatting {config.subcommand} rows")

        rows: List[Dict[str, Any]]
        if config.subcommand == "mc":
            rows = [estimate_row(e) for e in state.get("estimates", [])]
        else:
            rows = state.get("rows", [])

        state["rows"] = rows
        state["step"] = "complete"
        logger.info(f"Formatted {len(rows)} rows")
        return state


report_stage = ReportStage()
