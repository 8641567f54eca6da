"""Exception types shared by all modules.

The CLI maps these onto its exit-code contract.
"""


class SpbdivError(Exception):
    """Base class."""


class InvalidInput(SpbdivError, ValueError):
    """Parameters violate a precondition (exit status 2)."""


class GuardExceeded(SpbdivError):
    """An exhaustive computation was asked for on a too-large form (exit status 3)."""


class InvariantViolation(SpbdivError, AssertionError):
    """An internal consistency check failed (exit status 4)."""
