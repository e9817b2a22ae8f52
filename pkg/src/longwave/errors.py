"""Exception hierarchy shared by all longwave modules."""


class LongwaveError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(LongwaveError):
    """Invalid configuration: bad parameters, incompatible grids, bad input files."""


class GridMismatchError(ConfigurationError):
    """Fields that must share a grid were built on different grids."""


class SolverError(LongwaveError):
    """A linear solve failed (singular or ill-conditioned system, residual too large)."""


class InstabilityError(SolverError):
    """A time integration produced non-finite values.

    Attributes:
        step_index: time step at which the first non-finite value appeared.
    """

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class MissingSnapshotError(LongwaveError):
    """A trajectory was asked for a time it did not store."""


class DiagnosticError(LongwaveError):
    """A diagnostic could not be evaluated (e.g. too few snapshots for a fit)."""
