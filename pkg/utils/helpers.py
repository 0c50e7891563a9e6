"""Helper utility functions."""
import math
import re
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np

Number = Union[int, float, np.integer, np.floating]

def parse_int_list(text: str) -> List[int]:
    """Parse '1,3,5' (spaces allowed) into a list of integers."""
    parts = [p for p in re.split(r"[,\s]+", (text or "").strip()) if p]
    if not parts:
        raise ValueError("expected a comma-separated list of integers")
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"not an integer list: {text!r}") from None

def parse_float_list(text: str) -> List[float]:
    """Parse '0.1,0.2' into a list of floats."""
    parts = [p for p in re.split(r"[,\s]+", (text or "").strip()) if p]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return [float(p) for p in parts]

def format_number(value: Optional[Number]) -> str:
    """Render a number so that parse -> print round-trips (17 significant digits)."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")

def compensated_sum(values: Union[Iterable[float], np.ndarray]) -> float:
    """Exactly rounded sum (Shewchuk/fsum) of a float sequence."""
    if isinstance(values, np.ndarray):
        return math.fsum(values.ravel().tolist())
    return math.fsum(values)

def index_subset(text: str, n: int) -> List[int]:
    """Parse a 1-based index subset like '1,2' or '1-3' into 0-based indices."""
    indices: List[int] = []
    for part in [p for p in (text or "").split(",") if p.strip()]:
        if "-" in part.strip()[1:]:
            lo, hi = part.split("-", 1)
            indices.extend(range(int(lo), int(hi) + 1))
        else:
            indices.append(int(part))
    if not indices:
        raise ValueError("empty index subset")
    for i in indices:
        if not 1 <= i <= n:
            raise ValueError(f"index {i} outside 1..{n}")
    return [i - 1 for i in indices]

def max_abs(values: Sequence[float]) -> float:
    """Largest absolute value, 0 for an empty sequence."""
    arr = np.abs(np.asarray(values, dtype=float))
    return float(arr.max()) if arr.size else 0.0
