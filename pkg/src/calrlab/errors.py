"""Exception types shared across the library."""

__all__ = [
    "CalrLabError",
    "PreconditionError",
    "ModeSingularityError",
    "OracleConvergenceError",
]


class CalrLabError(Exception):
    """Base class for library errors."""


class PreconditionError(CalrLabError, ValueError):
    """An operation was called outside its stated hypotheses."""


class ModeSingularityError(CalrLabError):
    """The per-degree transmission system is (numerically) singular.

    Carries the offending degree so sweep drivers can annotate the point
    instead of aborting.
    """

    def __init__(self, degree: int, detail: str = "", condition: float | None = None):
        self.degree = degree
        self.condition = condition
        msg = f"transmission problem singular at degree k={degree}"
        if detail:
            msg += f": {detail}"
        if condition is not None:
            msg += f" (condition estimate {condition:.3e})"
        super().__init__(msg)


class OracleConvergenceError(CalrLabError):
    """The finite-difference oracle failed its grid-refinement check."""
