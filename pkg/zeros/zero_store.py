"""Zero data store: files, built-in samples and synthesized sets, memoised per key."""
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

from arithmetic.characters import CharacterTable, character_group
from config.settings import settings
from utils.errors import DomainError
from utils.logger import setup_logger
from zeros.synthesis import synthesize_zeros
from zeros.zero_file import parse_zero_file, serialize_zero_set
from zeros.zero_set import Provenance, REAL_DATA, ZeroSet, make_zero_set

logger = setup_logger(__name__)

# First ordinates of L(s, chi) for the non-principal character mod 4.
BUILTIN_ZEROS: Dict[int, Tuple[Tuple[int, Tuple[float, ...]], ...]] = {
    4: (
        (3, (
            6.020948904697597,
            10.243770304166555,
            12.988098012312424,
            16.342607104587958,
            18.29199319612349,
            21.45061134398311,
            23.27837652045998,
            25.72875642592013,
            28.35963434376669,
            29.656384014541014,
        )),
    ),
}


class ZeroStore:
    """Load, synthesize and save ZeroSets."""

    def __init__(self, data_dir: Optional[Path] = None):
        self.data_dir = Path(data_dir) if data_dir else settings.ZERO_DATA_DIR
        self.cache: Dict[Tuple, ZeroSet] = {}
        self._tables: Dict[int, CharacterTable] = {}

    def character_table(self, q: int) -> CharacterTable:
        """Get the (shared) character table mod q."""
        if q not in self._tables:
            self._tables[q] = character_group(q)
        return self._tables[q]

    def load_file(self, path: Union[str, Path]) -> ZeroSet:
        """Load a zero file; relative names are looked up in the data directory too."""
        path = Path(path)
        if not path.exists() and not path.is_absolute() and (self.data_dir / path).exists():
            path = self.data_dir / path
        key = ("file", str(path.resolve()))
        if key in self.cache:
            return self.cache[key]
        logger.info(f"Loading zero file: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                zs = parse_zero_file(f)
        except Exception as e:
            logger.error(f"Failed to load zero file {path}: {str(e)}")
            raise
        if not zs.is_complete:
            logger.warning(f"Zero file {path} covers {len(zs.blocks)} characters mod {zs.modulus}; "
                           "coverage is partial")
        self.cache[key] = zs
        return zs

    def save(self, zs: ZeroSet, path: Union[str, Path]) -> Path:
        """Serialize zs to path."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        try:
            with open(path, "w", encoding="utf-8") as f:
                serialize_zero_set(zs, f)
            logger.info(f"Zero set saved to {path}")
        except Exception as e:
            logger.error(f"Failed to save zero set: {str(e)}")
            raise
        return path

    def synthesize(self, q: int, count_per_char: Optional[int] = None, seed: int = 0,
                   workers: Optional[int] = None) -> ZeroSet:
        """Get a synthetic ZeroSet (memoised on q, count and seed)."""
        count = count_per_char or settings.DEFAULT_SYNTHETIC_COUNT
        key = ("synthetic", q, count, seed)
        if key not in self.cache:
            self.cache[key] = synthesize_zeros(q, self.character_table(q), count, seed, workers)
        return self.cache[key]

    def load_builtin(self, q: int) -> ZeroSet:
        """Load the built-in real zero sample for q."""
        if q not in BUILTIN_ZEROS:
            raise DomainError(f"no built-in zero data for modulus {q}; "
                              f"available: {sorted(BUILTIN_ZEROS)}")
        key = ("builtin", q)
        if key not in self.cache:
            logger.info(f"Loading built-in zero data for q={q}")
            self.cache[key] = make_zero_set(q, BUILTIN_ZEROS[q], Provenance(kind=REAL_DATA))
        return self.cache[key]

    def get_zeros(self, q: int, zero_file: Optional[str] = None, synthetic_count: Optional[int] = None,
                  seed: int = 0, workers: Optional[int] = None) -> ZeroSet:
        """Resolve zero data: explicit file, then built-in sample, then synthesis."""
        if zero_file:
            zs = self.load_file(zero_file)
            if zs.modulus != q:
                raise DomainError(f"zero file is for modulus {zs.modulus}, not {q}")
            return zs
        if synthetic_count is None and q in BUILTIN_ZEROS:
            return self.load_builtin(q)
        return self.synthesize(q, synthetic_count, seed, workers)

    def clear(self) -> None:
        self.cache.clear()


# Global zero store instance
zero_store = ZeroStore()
