"""Exception hierarchy shared by the library and the command-line front end."""


class VdwError(Exception):
    """Base class for all errors raised by this package."""


class InputError(VdwError, ValueError):
    """Malformed or inconsistent user input (unknown labels, bad config, ...)."""


class PreconditionError(VdwError, ValueError):
    """An operation was called outside its domain of validity."""


class DomainError(VdwError, ArithmeticError):
    """Evaluation at a genuine singularity (pole, zero frequency, zero distance)."""


class ResonanceError(DomainError):
    """Two energy denominators cancel exactly; carries the colliding level labels."""

    def __init__(self, message: str, labels: tuple = ()):
        super().__init__(message)
        self.labels = tuple(labels)


class ConvergenceError(VdwError, RuntimeError):
    """Adaptive quadrature ran out of subdivisions.

    Attributes:
        value: last estimate of the integral.
        error_estimate: last internal error estimate.
    """

    def __init__(self, message: str, value=None, error_estimate=None):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
