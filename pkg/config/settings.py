"""Application configuration settings."""
import os
from pathlib import Path
from dotenv import load_dotenv

# Project Root
PROJECT_ROOT_COMPUTED: Path = Path(__file__).resolve().parent.parent

# Load environment variables from project root .env explicitly
load_dotenv(PROJECT_ROOT_COMPUTED / ".env")

class Settings:
    """Application settings."""

    # Application Settings
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")

    # Sieve Configuration
    SIEVE_X_GUARD: int = int(os.getenv("SIEVE_X_GUARD", str(10**9)))
    SIEVE_SEGMENT_SIZE: int = int(os.getenv("SIEVE_SEGMENT_SIZE", "8000000"))

    # Arithmetic sums over n <= 2x log x with x = (q log q)^2
    MANGOLDT_SUM_Q_GUARD: int = int(os.getenv("MANGOLDT_SUM_Q_GUARD", "2000"))

    # Monte Carlo Configuration
    MC_CHUNK_SIZE: int = int(os.getenv("MC_CHUNK_SIZE", "65536"))
    MC_BATCH_ELEMENTS: int = int(os.getenv("MC_BATCH_ELEMENTS", "4000000"))
    DEFAULT_WORKERS: int = int(os.getenv("DEFAULT_WORKERS", "1"))
    MC_MIN_SAMPLES: int = 1000

    # Zero data
    DEFAULT_SYNTHETIC_COUNT: int = int(os.getenv("DEFAULT_SYNTHETIC_COUNT", "100"))

    # Project Root
    PROJECT_ROOT: Path = PROJECT_ROOT_COMPUTED
    ZERO_DATA_DIR: Path = Path(os.getenv("ZERO_DATA_DIR", str(PROJECT_ROOT_COMPUTED / "data")))

    @property
    def guard_override(self) -> bool:
        """Whether cost guards are lifted (read live from the environment)."""
        return os.getenv("RACE_GUARD_OVERRIDE", "0").strip() == "1"

settings = Settings()
