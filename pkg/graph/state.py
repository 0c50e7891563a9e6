"""LangGraph state definition."""
from typing import Any, Dict, List, Optional, TypedDict

from arithmetic.characters import CharacterTable
from config.experiment import ExperimentConfig
from model.covariance import CorrelationMatrix, ShiftVector
from model.events import DensityEstimate
from zeros.zero_set import ZeroSet


class RaceState(TypedDict):
    """State for the cov and mc pipelines."""

    # Resolved run configuration
    config: ExperimentConfig

    # Contestants and zero data
    residues: List[int]
    table: Optional[CharacterTable]
    zero_set: Optional[ZeroSet]

    # Covariance
    correlation: Optional[CorrelationMatrix]
    shifts: Optional[ShiftVector]

    # Monte Carlo
    estimates: List[DensityEstimate]

    # Output
    rows: List[Dict[str, Any]]
    notes: List[str]

    # Workflow control
    step: str
    error: Optional[str]


def initial_state(config: ExperimentConfig) -> RaceState:
    """Empty state for a resolved configuration."""
    return RaceState(
        config=config,
        residues=[],
        table=None,
        zero_set=None,
        correlation=None,
        shifts=None,
        estimates=[],
        rows=[],
        notes=[],
        step="start",
        error=None,
    )
