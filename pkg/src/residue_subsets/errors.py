"""Exception hierarchy shared by the library and the command line."""
from __future__ import annotations


class ResidueSubsetsError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ResidueSubsetsError, ValueError):
    """A mathematical precondition does not hold (non-prime, p = 3, even character, ...)."""


class UsageError(ResidueSubsetsError, ValueError):
    """The caller asked for something outside the supported surface."""


class MemoryGuardError(UsageError):
    """Table mode was requested for a modulus above the configured limit."""


class ConsistencyError(ResidueSubsetsError, RuntimeError):
    """An internal invariant failed; points at a bug rather than bad input."""


class VerificationError(ResidueSubsetsError, RuntimeError):
    """A delegate failed while the harness evaluated an identity or claim."""

    def __init__(self, message: str, *, p: int, check_id: str) -> None:
        super().__init__(f"p={p} [{check_id}]: {message}")
        self.p = p
        self.check_id = check_id
