"""Exception hierarchy.

Every error carries a module-qualified ``code`` (``"special.gamma_pole"``,
``"fermi.contour_proximity"``, ...) which the CLI copies into its reports.
"""

from __future__ import annotations


class HigherFermiError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "higherfermi.error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class SpecialFunctionError(HigherFermiError):
    code = "special.error"


class PoleError(SpecialFunctionError, ZeroDivisionError):
    """Evaluation at (or numerically on top of) a pole."""

    code = "special.pole"


class QuadratureError(SpecialFunctionError):
    """Node budget exhausted before the requested tolerance was met."""

    code = "special.quadrature"


class UnderflowError(SpecialFunctionError, ArithmeticError):
    """Result is too small to represent; distinct from a genuine zero."""

    code = "special.underflow"


class OverflowError_(SpecialFunctionError, OverflowError):
    code = "special.overflow"


class QuadraticFormError(HigherFermiError):
    code = "qform.error"


class FormDataError(HigherFermiError):
    code = "forms.error"


class CoefficientParseError(FormDataError, ValueError):
    """Malformed coefficient file; ``line`` is 1-based when known."""

    code = "forms.parse"

    def __init__(self, message: str, line: int | None = None, *, code: str | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, code=code)
        self.line = line


class LSeriesError(HigherFermiError):
    code = "lseries.error"


class ConvergenceRegionError(LSeriesError):
    code = "lseries.non_convergent"


class ScatteringError(HigherFermiError):
    code = "scatter.error"


class FermiError(HigherFermiError):
    code = "fermi.error"


class ContourError(FermiError):
    code = "fermi.contour"


class TruncationWarning(UserWarning):
    """A truncated sum may be missing more than the requested tolerance."""


class GrowthWarning(UserWarning):
    """Stored coefficients exceed the configured growth envelope."""
