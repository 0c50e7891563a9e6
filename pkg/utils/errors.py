"""Exception types raised across the package."""
from typing import Optional


class RaceError(Exception):
    """Base class for every error the library raises on purpose."""


class DomainError(RaceError, ValueError):
    """An argument lies outside the domain of the operation."""


class NonUnitResidueError(DomainError):
    """A residue shares a factor with the modulus."""

    def __init__(self, a: int, q: int, flag: Optional[str] = None):
        prefix = f"{flag}: " if flag else ""
        super().__init__(f"{prefix}non-unit residue: gcd({a}, {q}) > 1")
        self.a = a
        self.q = q


class MissingParameterError(DomainError):
    """A bound or report was requested without one of its inputs."""


class ZeroFileParseError(RaceError, ValueError):
    """A zero file line could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line_number = line_number


class ZeroFileValidationError(RaceError, ValueError):
    """Parsed zero data violates a ZeroSet invariant."""


class CostGuardError(RaceError):
    """A computation was refused because it exceeds desk scale."""


class NotPSDError(RaceError, ArithmeticError):
    """A correlation matrix could not be factored even after jitter."""


class SingularMatrixError(RaceError, ArithmeticError):
    """A matrix that must be invertible is singular."""
