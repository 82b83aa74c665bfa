"""
Exception hierarchy shared by every Fractional Fit Engine component
"""
from typing import Optional


class FractionalEngineError(Exception):
    """Base class for all engine errors"""


class DomainError(FractionalEngineError, ValueError):
    """Argument outside the domain of an operation"""


class DegenerateParametersError(DomainError):
    """Parameters at which a closed form is singular"""


class ConvergenceError(FractionalEngineError):
    """A series or iterative procedure did not converge within its budget"""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature exhausted its panel budget"""


class SeriesOverflowError(FractionalEngineError, OverflowError):
    """A series term falls outside the representable floating-point range"""


class DatasetError(FractionalEngineError):
    """Base class for dataset ingestion problems"""


class ParseError(DatasetError):
    """Malformed CSV input"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(DatasetError, ValueError):
    """Parsed data violates a TimeSeries invariant"""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")


class MissingDatasetError(DatasetError):
    """An external-ingestion dataset has not been supplied"""


class UnknownDatasetError(DatasetError, LookupError):
    """No bundled dataset under that name"""


class UnknownModelError(FractionalEngineError, LookupError):
    """No registered model under that name"""


class FitError(FractionalEngineError):
    """Every start of a fit failed"""


# Errors a model evaluation may legitimately raise for a parameter point
MODEL_EVALUATION_ERRORS = (DomainError, ConvergenceError, SeriesOverflowError, FloatingPointError)
