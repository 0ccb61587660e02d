class QCollapseError(Exception):
    """Base class for every error raised by qcollapse."""


class ValidationError(QCollapseError):
    """Bad input; the CLI exits with code 1."""

    exit_code = 1


class NumericalError(QCollapseError):
    """A computation failed to reach its accuracy contract; exit code 2."""

    exit_code = 2


class InvalidInput(ValidationError):
    pass


class FallConditionViolated(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class PoleError(DomainError):
    pass


class ConvergenceError(NumericalError):
    pass


class GammaOverflowError(NumericalError, OverflowError):
    pass


class QuadratureError(NumericalError):
    pass


class SolverError(NumericalError):
    pass


class FitError(NumericalError):
    pass


class HaltedAtCore(NumericalError):
    """Raised when a collapse run reaches the regularisation scale.

    The record gathered up to that point is kept on ``record``.
    """

    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record
