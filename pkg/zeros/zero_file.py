"""Zero file wire format.

    modulus <q>
    chi <conrey_index>
    <gamma>
    <gamma>
    ...

'#' lines are comments, blank lines are ignored. Gammas are written with
repr() so that parse(serialize(zs)) reproduces every float exactly.
"""
import re
from typing import Dict, List, Optional, TextIO, Tuple

from utils.errors import ZeroFileParseError, ZeroFileValidationError
from utils.logger import setup_logger
from zeros.zero_set import Provenance, REAL_DATA, ZeroSet, make_zero_set

logger = setup_logger(__name__)

_MODULUS = re.compile(r"^modulus\s+(\S+)$")
_CHI = re.compile(r"^chi\s+(\S+)$")


def _parse_int(token: str, what: str, line_number: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ZeroFileParseError(f"{what} is not an integer: {token!r}", line_number) from None


def parse_zero_file(stream: TextIO) -> ZeroSet:
    """Parse and validate a zero file. Provenance is always RealData."""
    modulus: Optional[int] = None
    blocks: List[Tuple[int, List[float]]] = []
    current: Optional[List[float]] = None

    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if modulus is None:
            m = _MODULUS.match(line)
            if not m:
                raise ZeroFileParseError("expected 'modulus <q>' header", line_number)
            modulus = _parse_int(m.group(1), "modulus", line_number)
            continue
        m = _CHI.match(line)
        if m:
            current = []
            blocks.append((_parse_int(m.group(1), "conrey index", line_number), current))
            continue
        if current is None:
            raise ZeroFileParseError("ordinate before any 'chi <index>' line", line_number)
        try:
            gamma = float(line)
        except ValueError:
            raise ZeroFileParseError(f"malformed line: {line!r}", line_number) from None
        current.append(gamma)

    if modulus is None:
        raise ZeroFileParseError("missing 'modulus <q>' header")
    for idx, gammas in blocks:
        if not gammas:
            raise ZeroFileValidationError(f"empty block for conrey index {idx}")
    zs = make_zero_set(modulus, blocks, Provenance(kind=REAL_DATA))
    logger.info(f"Parsed zero file: q={modulus}, {len(blocks)} blocks, "
                f"{zs.truncation_count} ordinates")
    return zs


def serialize_zero_set(zs: ZeroSet, stream: TextIO) -> None:
    """Write zs in the zero file format."""
    stream.write(f"# provenance: {zs.provenance.describe()}\n")
    stream.write(f"modulus {zs.modulus}\n")
    for block in zs.blocks:
        stream.write(f"chi {block.conrey_index}\n")
        for gamma in block.gammas.tolist():
            stream.write(f"{gamma!r}\n")


def block_sizes(zs: ZeroSet) -> Dict[int, int]:
    return {b.conrey_index: len(b) for b in zs.blocks}
