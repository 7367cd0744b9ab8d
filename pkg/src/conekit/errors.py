"""Exception types shared across conekit."""


class ConekitError(Exception):
    """Base class for all library errors."""


class ParameterDomainError(ConekitError, ValueError):
    """Weight or operator parameters outside their admissible range."""


class CapabilityError(ConekitError, NotImplementedError):
    """Requested dimension or family is not supported."""


class ConfigurationError(ConekitError, ValueError):
    """Mismatched rule/weight/family combination or insufficient quadrature order."""


class GeometryError(ConekitError, ValueError):
    """A point lies outside the domain, or too close to its boundary."""


class ConsistencyError(ConekitError, ArithmeticError):
    """An exact computation produced a non-polynomial (non-cancelling) term."""


class NumericError(ConekitError, ArithmeticError):
    """An iterative numerical procedure failed to converge."""


class ContractError(ConekitError, ValueError):
    """A user-supplied function violates a structural requirement (e.g. evenness)."""


class DegreeError(ConekitError, ValueError):
    """A term's degree exceeds the target degree of an operation."""


class ShapeError(ConekitError, ValueError):
    """Operands of mismatched dimension."""


class BasisIndexError(ConekitError, IndexError):
    """A basis index (n, m, inner) outside its valid range."""


class EvaluationError(ConekitError, ArithmeticError):
    """A parsed expression cannot be evaluated at the given point."""


class ExprSyntaxError(ConekitError, ValueError):
    """Malformed expression text; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col
