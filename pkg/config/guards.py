"""Cost guards for computations that grow past desk scale."""
from config.settings import settings
from utils.errors import CostGuardError

class CostGuards:
    """Refuse oversized workloads unless RACE_GUARD_OVERRIDE=1."""

    @staticmethod
    def check_sieve_limit(x: int) -> None:
        """Check the upper limit of a prime sieve."""
        if x > settings.SIEVE_X_GUARD and not settings.guard_override:
            raise CostGuardError(
                f"cost guard: X={x} exceeds {settings.SIEVE_X_GUARD} "
                "(set RACE_GUARD_OVERRIDE=1 to lift)"
            )

    @staticmethod
    def check_mangoldt_modulus(q: int) -> None:
        """Check the modulus of the M1/M2 sums, whose loops grow like q^2 log^3 q."""
        if q > settings.MANGOLDT_SUM_Q_GUARD and not settings.guard_override:
            raise CostGuardError(
                f"cost guard: q={q} exceeds {settings.MANGOLDT_SUM_Q_GUARD} for M1/M2 sums "
                "(set RACE_GUARD_OVERRIDE=1 to lift)"
            )

cost_guards = CostGuards()
