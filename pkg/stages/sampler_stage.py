"""Monte Carlo stage: one sample stream, every requested event."""
from typing import List, Optional

import numpy as np

from analytics.bounds import BoundKind, bound_value
from graph.state import RaceState
from model.covariance import CorrelationMatrix
from model.events import FIRSTK, FULL, LEADER, MODEL_X, OrderingEvent, parse_event
from model.sampler import XModel, ZModel, mc_event_probabilities
from utils.errors import DomainError, RaceError
from utils.logger import setup_logger

logger = setup_logger(__name__)


def event_bound(event: OrderingEvent, cm: CorrelationMatrix) -> Optional[float]:
    """Error bound attached to an estimate, with every implicit constant set to 1."""
    n = event.n
    if n < 2:
        return None
    if event.kind == LEADER:
        r = np.abs(cm.r)
        r1_sum = float(np.delete(r[event.index], event.index).sum())
        rij_sum = float(np.triu(r, k=1).sum())
        return bound_value(BoundKind.PROB_LEADER, {"n": n, "r1_sum": r1_sum, "rij_sum": rij_sum}).value
    if cm.q < 3:
        return None
    if event.kind == FULL:
        return bound_value(BoundKind.FULL_RACE_ERROR, {"n": n, "q": cm.q}).value
    if event.kind == FIRSTK:
        return bound_value(BoundKind.FIRST_K_ERROR, {"n": n, "k": event.k, "q": cm.q}).value
    return None


def resolve_events(texts: List[str], n: int) -> List[OrderingEvent]:
    """Parsed --event specs; the identity ordering when none is given."""
    if not texts:
        return [OrderingEvent.full(range(n))]
    try:
        return [parse_event(t, n) for t in texts]
    except DomainError as e:
        raise DomainError(f"--event: {e}") from None


class SamplerStage:
    """Monte Carlo estimation stage."""

    def run_mc(self, state: RaceState) -> RaceState:
        """Estimate every requested event on the X or Z model."""
        config = state["config"]
        cm = state["correlation"]
        logger.info(f"Running Monte Carlo: model={config.model}, samples={config.samples}")

        try:
            events = resolve_events(config.events, cm.n)
            if config.model == MODEL_X:
                if state.get("zero_set") is None:
                    raise DomainError("--model x needs zero data")
                model = XModel(state["zero_set"], state["table"], state["residues"],
                               include_shifts=not config.no_shifts, shifts=state["shifts"],
                               variance=cm.var_q)
            else:
                model = ZModel(cm)
                if model.jitter:
                    state["notes"] = state.get("notes", []) + [f"jitter: {model.jitter:g}"]

            bounds = [event_bound(e, cm) for e in events]
            estimates = mc_event_probabilities(model, events, config.samples, config.seed,
                                               workers=config.workers, bounds=bounds)

            state["estimates"] = estimates
            state["step"] = "sampled"

            logger.info(f"Monte Carlo complete: {len(estimates)} events")

        except (RaceError, ValueError) as e:
            logger.error(f"Monte Carlo error: {str(e)}")
            state["error"] = str(e)
            state["step"] = "error"

        return state


sampler_stage = SamplerStage()
