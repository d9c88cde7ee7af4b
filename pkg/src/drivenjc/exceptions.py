"""Exception and warning types shared across the package."""


class DimensionError(ValueError):
    """Operator or state dimensions are invalid or incompatible."""


class DomainError(ValueError):
    """Parameters lie outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative computation failed to reach its tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MultiplicityError(RuntimeError):
    """The steady-state null space is degenerate (dimension > 1)."""


class InvalidStateError(ValueError):
    """A density matrix or reduced state violates its invariants."""


class ConfigError(ValueError):
    """A sweep configuration document is malformed."""


class SweepError(RuntimeError):
    """Every point of a parameter sweep failed."""


class TruncationWarning(UserWarning):
    """The requested computation strains the Fock-space truncation."""
