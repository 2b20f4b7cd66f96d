"""Exception types shared across the toolkit."""


class EdiLabError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(EdiLabError, ValueError):
    """Inconsistent or unsupported configuration (alphabets, link parameters, ...)."""


class InvalidInputError(EdiLabError, ValueError):
    """Input data violates a documented precondition."""


class RangeError(EdiLabError, ValueError):
    """Argument outside its documented range (e.g. codeword index >= codebook size)."""


class DomainError(EdiLabError, ValueError):
    """Closed-form expression evaluated outside its region of validity."""


class ResourceLimitError(EdiLabError, RuntimeError):
    """Computation would exceed a guarded resource budget (state count, memory)."""


class NumericalDivergenceError(EdiLabError, ArithmeticError):
    """Non-finite values encountered during numerical propagation."""


class CorrelationUndefinedError(EdiLabError, ValueError):
    """Correlation requested for degenerate (zero-variance) data."""
