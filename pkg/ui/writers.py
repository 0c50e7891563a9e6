"""CSV and JSON output for every subcommand."""
import json
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np
import pandas as pd

from config.experiment import ExperimentConfig
from utils.helpers import format_number

REPORT_COLUMNS = ["kind", "inputs", "value", "oracle", "ratio"]
TIMESTAMP_KEY = "generated_at"


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(to_jsonable(value), sort_keys=True)
    return format_number(value)


def to_jsonable(value: Any) -> Any:
    """numpy scalars and arrays, tuples and enums as plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Enum):
        return value.value
    return value


def report_object(kind: str, inputs: Dict[str, Any], value: float,
                  oracle: Optional[float] = None) -> Dict[str, Any]:
    """{kind, inputs, value, oracle, ratio}; ratio = value/oracle when both exist."""
    ratio = None
    if oracle is not None and oracle != 0 and value is not None:
        ratio = float(value) / float(oracle)
    return {
        "kind": kind,
        "inputs": to_jsonable(inputs),
        "value": to_jsonable(value),
        "oracle": to_jsonable(oracle),
        "ratio": ratio,
    }


def results_frame(rows: Sequence[Dict[str, Any]], columns: List[str]) -> pd.DataFrame:
    """Rows rendered as text cells in a fixed column order."""
    return pd.DataFrame([{c: format_cell(row.get(c)) for c in columns} for row in rows],
                        columns=columns)


def write_csv(stream: TextIO, rows: Sequence[Dict[str, Any]], columns: List[str],
              config: ExperimentConfig, notes: Sequence[str] = (), timestamp: bool = True) -> None:
    """Header comments (resolved config, notes, timestamp), then the table."""
    for line in config.header_lines():
        stream.write(line + "\n")
    for note in notes:
        stream.write(f"# note: {note}\n")
    if timestamp:
        stream.write(f"# {TIMESTAMP_KEY} = {datetime.now(timezone.utc).isoformat()}\n")
    results_frame(rows, columns).to_csv(stream, index=False, lineterminator="\n")


def write_json(stream: TextIO, rows: Sequence[Dict[str, Any]], config: ExperimentConfig,
               notes: Sequence[str] = ()) -> None:
    """{"config": ..., "notes": [...], "results": [...]}; floats keep their shortest exact repr."""
    document = {
        "config": config.header_items(),
        "notes": list(notes),
        "results": [to_jsonable(row) for row in rows],
    }
    stream.write(json.dumps(document, indent=2, sort_keys=False) + "\n")


def write_results(stream: TextIO, rows: Sequence[Dict[str, Any]], columns: List[str],
                  config: ExperimentConfig, notes: Sequence[str] = ()) -> None:
    """Dispatch on config.format."""
    if config.format == "json":
        write_json(stream, rows, config, notes)
    else:
        write_csv(stream, rows, columns, config, notes)


def strip_timestamp(text: str) -> str:
    """Output text without the timestamp comment line."""
    return "".join(line for line in text.splitlines(keepends=True)
                   if not line.startswith(f"# {TIMESTAMP_KEY} ="))
