"""Exception types raised across the package.

Plain ValueError is used for ordinary argument validation (negative rates,
empty lists, unsorted grids). The classes here mark failures that callers
may want to catch and handle separately.
"""


class AtomCavityError(Exception):
    """Base class for package-specific failures."""


class SingularityError(AtomCavityError):
    """Closed-form response evaluated exactly at a pole."""


class DimensionCapError(AtomCavityError):
    """Requested Hilbert space exceeds the supported dimension cap."""


class DegenerateSteadyStateError(AtomCavityError):
    """Liouvillian kernel is more than one-dimensional."""


class SteadyStateConvergenceError(AtomCavityError):
    """Steady-state solve finished with an unacceptable residual."""


class DegenerateFitError(AtomCavityError):
    """Normal equations singular at the solution; parameters not identifiable."""


class TableFormatError(AtomCavityError):
    """Malformed tabular input. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
