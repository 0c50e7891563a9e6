"""Resolved experiment configuration: config file values overridden by flags."""
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config.settings import settings
from utils.errors import DomainError
from utils.helpers import format_number, parse_float_list, parse_int_list
from utils.logger import setup_logger

logger = setup_logger(__name__)


class ExperimentConfig(BaseModel):
    """Everything one run depends on; echoed into every output header."""
    model_config = ConfigDict(extra="forbid")

    subcommand: Literal["zeros", "cov", "mc", "sieve", "predict", "check", "harmonic"]

    # contestants
    q: Optional[int] = None
    residues: Optional[List[int]] = None
    tuple_spec: Optional[str] = None

    # zero data
    zero_file: Optional[str] = None
    synthetic_count: Optional[int] = Field(default=None, ge=1)
    builtin: bool = False

    # Monte Carlo
    model: Literal["x", "z"] = "z"
    events: List[str] = Field(default_factory=list)
    samples: int = Field(default=100000, ge=settings.MC_MIN_SAMPLES)
    seed: int = 0
    workers: int = Field(default=settings.DEFAULT_WORKERS, ge=1)
    rho: Optional[float] = None
    n: Optional[int] = Field(default=None, ge=1)
    no_shifts: bool = False

    # sieve and harmonic
    x: Optional[float] = None
    trace: Optional[str] = None
    Q: Optional[int] = Field(default=None, ge=1)
    R: Optional[int] = Field(default=None, ge=1)
    S: Optional[int] = Field(default=None, ge=1)
    offset: float = 0.0
    theta_point: Optional[float] = None

    # predictions and checks
    kind: Optional[str] = None
    check: Optional[str] = None
    k: Optional[int] = None
    r1_sum: Optional[float] = None
    rij_sum: Optional[float] = None
    epsilon: Optional[float] = None
    epsilon1: Optional[float] = None
    A: Optional[float] = None
    B: Optional[float] = None
    a: Optional[float] = None
    theta: Optional[float] = None
    r12: Optional[float] = None
    thresholds: Optional[List[float]] = None
    subset_i: Optional[str] = None
    subset_j: Optional[str] = None
    trials: int = Field(default=100, ge=1)
    constant_c: float = Field(default=1.0, ge=0.0)

    # output
    out: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None

    @field_validator("residues", mode="before")
    @classmethod
    def _split_residues(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_int_list(value)
        return value

    @field_validator("thresholds", mode="before")
    @classmethod
    def _split_thresholds(cls, value: Any) -> Any:
        if isinstance(value, str):
            return parse_float_list(value)
        return value

    @field_validator("events", mode="before")
    @classmethod
    def _wrap_event(cls, value: Any) -> Any:
        if value is None:
            return []
        if isinstance(value, str):
            return [value]
        return value

    @model_validator(mode="after")
    def _default_format(self) -> "ExperimentConfig":
        if self.format is None:
            self.format = "json" if self.subcommand in ("predict", "check") else "csv"
        return self

    def sieve_limit(self) -> int:
        """x as an integer sieve limit."""
        if self.x is None:
            raise DomainError("--x is required")
        if self.x != int(self.x) or self.x < 2:
            raise DomainError(f"--x must be an integer >= 2 for the sieve, got {self.x}")
        return int(self.x)

    def header_items(self) -> Dict[str, str]:
        """Resolved, non-empty values as sorted text."""
        items: Dict[str, str] = {}
        for key, value in sorted(self.model_dump().items()):
            if value is None or value == []:
                continue
            if isinstance(value, list):
                items[key] = ";".join(format_number(v) if not isinstance(v, str) else v for v in value)
            elif isinstance(value, str):
                items[key] = value
            else:
                items[key] = format_number(value)
        return items

    def header_lines(self) -> List[str]:
        return [f"# {k} = {v}" for k, v in self.header_items().items()]


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read 'key = value' lines; '#' starts a comment, repeated 'event' keys accumulate."""
    values: Dict[str, Any] = {}
    with open(path, "r", encoding="utf-8") as f:
        for line_number, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise DomainError(f"{path}: line {line_number}: expected 'key = value'")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in ("event", "events"):
                values.setdefault("events", []).append(value)
            else:
                values[key] = value
    logger.debug(f"Loaded {len(values)} keys from {path}")
    return values


def resolve_config(file_values: Optional[Dict[str, Any]], flag_values: Dict[str, Any]) -> ExperimentConfig:
    """Flags override file values; unset flags (None or empty) leave file values alone."""
    merged: Dict[str, Any] = dict(file_values or {})
    for key, value in flag_values.items():
        if value is None or value is False or value == []:
            continue
        merged[key] = value
    return ExperimentConfig(**merged)
