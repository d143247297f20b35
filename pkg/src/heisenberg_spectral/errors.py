"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class PoleError(DomainError):
    """A resolvent was requested on the real axis."""


class GridRangeError(DomainError):
    """A shift or lookup left the discrete lambda grid."""


class ResolutionError(RuntimeError):
    """A numerical resolution gate (projection residual, tail, convergence) failed."""

    def __init__(self, message, value=None, gate=None):
        super().__init__(message)
        self.value = value
        self.gate = gate


class OptimizationError(RuntimeError):
    """A minimisation ended on the boundary of its search interval."""
