"""Zero data stage: character table, zero set and contestant residues."""
from typing import List

from analytics.bias import biased_tuple
from config.experiment import ExperimentConfig
from graph.state import RaceState
from utils.arith import require_unit, units
from utils.errors import DomainError, RaceError
from utils.helpers import parse_int_list
from utils.logger import setup_logger
from zeros.zero_store import zero_store

logger = setup_logger(__name__)


def resolve_residues(config: ExperimentConfig) -> List[int]:
    """Explicit --residues, else a tuple spec: 'all', 'first:n' or 'biased:k,n'."""
    q = config.q
    if q is None:
        raise DomainError("--q is required")
    if config.residues:
        return [require_unit(a, q, "--residues") for a in config.residues]
    spec = (config.tuple_spec or "").strip().lower()
    if not spec:
        raise DomainError("one of --residues or --tuple is required")
    kind, _, arg = spec.partition(":")
    try:
        if kind == "all":
            return units(q)
        if kind == "first":
            n = int(arg)
            group = units(q)
            if not 1 <= n <= len(group):
                raise DomainError(f"first:{n} needs 1 <= n <= phi(q) = {len(group)}")
            return group[:n]
        if kind == "biased":
            k, n = parse_int_list(arg)
            return list(biased_tuple(q, k, n))
    except ValueError as e:
        raise DomainError(f"--tuple: {e}") from None
    raise DomainError(f"--tuple: unknown tuple {config.tuple_spec!r}")


class ZeroStage:
    """Zero data loading stage."""

    def load_zeros(self, state: RaceState) -> RaceState:
        """Resolve the residues and the zero set for the configured modulus."""
        config = state["config"]
        logger.info(f"Loading zero data for q={config.q}")

        try:
            residues = resolve_residues(config)
            q = config.q
            zs = zero_store.get_zeros(q, config.zero_file, config.synthetic_count,
                                      config.seed, config.workers)

            state["residues"] = residues
            state["table"] = zero_store.character_table(q)
            state["zero_set"] = zs
            state["notes"] = state.get("notes", []) + [f"zeros: {zs.provenance.describe()}"]
            if not zs.is_complete:
                state["notes"].append(f"partial: {len(zs.blocks)} of "
                                      f"{len(state['table'].nonprincipal_indices)} characters")
            state["step"] = "zeros_loaded"

            logger.info(f"Zero data ready: {len(zs.blocks)} characters, "
                        f"truncation count {zs.truncation_count}")

        except (RaceError, OSError, ValueError) as e:
            logger.error(f"Zero loading error: {str(e)}")
            state["error"] = str(e)
            state["step"] = "error"

        return state


zero_stage = ZeroStage()
