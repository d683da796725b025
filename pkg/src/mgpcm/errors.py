"""Exception types shared across the package."""


class DataValidationError(ValueError):
    """Raised when a response matrix fails validation.

    ``offenders`` holds (item, category) pairs with zero observations, or
    (row, item) pairs for malformed cells, depending on the failure.
    """

    def __init__(self, message, offenders=None):
        super().__init__(message)
        self.offenders = list(offenders) if offenders is not None else []


class GenerationError(RuntimeError):
    """Raised when the simulator exhausts its redraw budget."""

    def __init__(self, message, sparsest=None):
        super().__init__(message)
        self.sparsest = sparsest


class BootstrapError(RuntimeError):
    """Raised when too few bootstrap replicates succeed."""


class RotationError(RuntimeError):
    """Raised when an oblique rotation step is numerically singular."""


class NumericalError(ArithmeticError):
    """Internal-consistency failure in a numerical routine."""
