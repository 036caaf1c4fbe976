"""Exception hierarchy for the solver.

Every failure mode that carries diagnostic context (a spectral point, a grid
location, a transformation level) gets its own class so callers can react to
the cause instead of parsing messages.
"""


class ABRogueError(Exception):
    """Base class for all errors raised by this package."""


class JetBranchError(ABRogueError):
    """Square root of a jet whose leading exponent is odd (branch point)."""


class JetDomainError(ABRogueError):
    """Operation outside a jet's domain (zero divisor, essential singularity)."""


class JetOrderError(ABRogueError):
    """A coefficient beyond the tracked truncation window was requested."""


class SingularMatrixError(ABRogueError):
    """2x2 matrix inversion with a non-invertible determinant."""


class SpectralPointError(ABRogueError):
    """Invalid spectral parameter (zero, or degenerate for the generic path)."""


class DegenerateEigenfunctionError(ABRogueError):
    """Eigenfunction norm underflowed during a transformation step."""

    def __init__(self, message, x=None, t=None, level=None):
        super().__init__(message)
        self.x = x
        self.t = t
        self.level = level


class ConsistencyError(ABRogueError):
    """An internal identity failed beyond tolerance (transcription or branch bug)."""


class GridError(ABRogueError):
    """Malformed grid (too small, non-uniform, inconsistent sample count)."""


class UsageError(ABRogueError):
    """Invalid request at the API or CLI surface (maps to exit code 2)."""
