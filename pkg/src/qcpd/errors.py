"""Exception types raised by the package."""


class QcpdError(Exception):
    """Base class for all library errors."""


class DomainError(QcpdError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ShapeError(QcpdError, ValueError):
    """Incompatible array or matrix shapes."""


class StructureError(QcpdError, ValueError):
    """A complex matrix does not carry the expected adjoint block structure."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IllConditionedError(QcpdError, ArithmeticError):
    """Numerical rank decision falls inside a singular value pair gap."""

    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class ResourceError(QcpdError, RuntimeError):
    """Exhaustive computation refused because it exceeds a size guard."""


class InvalidScaling(QcpdError, ValueError):
    """Scaling triple violates the admissibility constraint."""


class PreconditionError(QcpdError, ValueError):
    """Rank assumptions required by a check do not hold."""


class SingularUpdateError(QcpdError, ArithmeticError):
    """An ALS block update could not be computed."""


class RankDeficientWarning(UserWarning):
    """Least-squares normal matrix is rank deficient; min-norm solution used."""
