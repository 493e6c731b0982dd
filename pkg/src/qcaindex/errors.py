"""Exception types shared across the package."""


class QCAError(Exception):
    """Base class for all package errors."""


class DomainError(QCAError, ValueError):
    """Input violates an operation's precondition."""


class NumericalFailure(QCAError):
    """A computation produced a result that fails its own consistency checks."""


class NotFactorizable(NumericalFailure):
    def __init__(self, residual: float, message: str | None = None):
        self.residual = residual
        super().__init__(message or f"operator is not a tensor product across the cut (residual {residual:.3e})")


class SnapFailure(NumericalFailure):
    def __init__(self, value: float, message: str | None = None):
        self.value = value
        super().__init__(message or f"no smooth rational within tolerance of {value!r}")


class NotSymmetric(NumericalFailure):
    pass


class UndefinedSPI(NumericalFailure):
    pass


class SpectrumObstruction(QCAError):
    pass


class LocalityViolation(NumericalFailure):
    pass


class NoIntertwiner(QCAError):
    pass


class NoSolution(QCAError):
    pass
