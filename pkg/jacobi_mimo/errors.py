"""
Custom exceptions and exit-code mapping.

This module provides the exception hierarchy shared by the numerical core and
the command-line surface, and the mapping from exceptions to process exit
codes.
"""

import logging
from typing import Optional

from pydantic import ValidationError

from jacobi_mimo import __app_name__


logger = logging.getLogger(__app_name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4


class JacobiMimoError(Exception):
    """
    Base class for all library errors.

    Attributes:
        exit_code: Process exit code used by the CLI
        detail: Error detail message
        code: Error code for machine consumption
    """

    def __init__(
        self,
        exit_code: int,
        detail: str,
        code: Optional[str] = None,
    ):
        self.exit_code = exit_code
        self.detail = detail
        self.code = code or "error"
        super().__init__(detail)


class InvalidConfigError(JacobiMimoError):
    """
    Error raised when a channel configuration or run option is invalid.

    Attributes:
        detail: Error detail message naming the violated invariant
        code: Error code for machine consumption
    """

    def __init__(
        self,
        detail: str = "Invalid configuration",
        code: str = "invalid_config",
    ):
        super().__init__(exit_code=EXIT_INVALID_CONFIG, detail=detail, code=code)

    @classmethod
    def from_validation_error(cls, exc: ValidationError) -> "InvalidConfigError":
        """
        Build a single-line diagnostic from a pydantic validation error.

        Args:
            exc: The validation error raised by a schema

        Returns:
            InvalidConfigError: Error whose detail names the first violated field
        """
        parts = []
        for error in exc.errors():
            loc = ".".join(str(p) for p in error.get("loc", ())) or exc.title
            parts.append(f"{loc}: {error.get('msg', '')}")
        return cls(detail="; ".join(parts))


class DomainError(JacobiMimoError):
    """Error raised when an argument lies outside a function's domain."""

    def __init__(self, detail: str = "Argument outside the domain", code: str = "domain_error"):
        super().__init__(exit_code=EXIT_FAILURE, detail=detail, code=code)


class PoleError(DomainError):
    """Error raised at a pole of the gamma function."""

    def __init__(self, detail: str = "Pole of the gamma function", code: str = "pole_error"):
        super().__init__(detail=detail, code=code)


class ParameterError(DomainError):
    """Error raised when a special-function parameter is inadmissible."""

    def __init__(self, detail: str = "Inadmissible parameter", code: str = "parameter_error"):
        super().__init__(detail=detail, code=code)


class DimensionError(JacobiMimoError):
    """Error raised when matrix or channel dimensions are inconsistent."""

    def __init__(self, detail: str = "Inconsistent dimensions", code: str = "dimension_error"):
        super().__init__(exit_code=EXIT_FAILURE, detail=detail, code=code)


class NumericalConsistencyError(JacobiMimoError):
    """
    Base class for failures of an internal numerical check.

    The CLI maps every subclass to exit code 3.
    """

    def __init__(self, detail: str = "Numerical consistency check failed", code: str = "numerical_error"):
        super().__init__(exit_code=EXIT_NUMERICAL, detail=detail, code=code)


class ConvergenceError(NumericalConsistencyError):
    """Error raised when a series exhausts its term budget."""

    def __init__(self, detail: str = "Series did not converge", code: str = "convergence_error"):
        super().__init__(detail=detail, code=code)


class NonFiniteError(NumericalConsistencyError):
    """Error raised when a computation produces NaN or infinity."""

    def __init__(self, detail: str = "Non-finite value", code: str = "non_finite"):
        super().__init__(detail=detail, code=code)


class SingularMatrixError(NumericalConsistencyError):
    """Error raised when a determinant is singular to working precision."""

    def __init__(self, detail: str = "Singular matrix", code: str = "singular_matrix"):
        super().__init__(detail=detail, code=code)


class KernelConsistencyError(NumericalConsistencyError):
    """Error raised when the closed-form and quadrature kernels disagree."""

    def __init__(self, detail: str = "Kernel routes disagree", code: str = "kernel_consistency"):
        super().__init__(detail=detail, code=code)


class DifferentiationAccuracyError(NumericalConsistencyError):
    """Error raised when a finite-difference moment fails its residue check."""

    def __init__(self, detail: str = "Moment residue too large", code: str = "differentiation_accuracy"):
        super().__init__(detail=detail, code=code)


class InversionResidueError(NumericalConsistencyError):
    """Error raised when an inverted value keeps an imaginary residue."""

    def __init__(self, detail: str = "Inversion residue too large", code: str = "inversion_residue"):
        super().__init__(detail=detail, code=code)


class InadequateGridError(NumericalConsistencyError):
    """Error raised when ringing or monotonicity shows the (L, dkappa) grid is too coarse."""

    def __init__(self, detail: str = "Inadequate kappa grid", code: str = "inadequate_grid"):
        super().__init__(detail=detail, code=code)


class CutoffSearchError(NumericalConsistencyError):
    """Error raised when the automatic cut-off search exceeds its limit."""

    def __init__(self, detail: str = "Automatic cut-off search failed", code: str = "cutoff_search"):
        super().__init__(detail=detail, code=code)


class DegenerateEnsembleError(JacobiMimoError):
    """Error raised when every Monte Carlo sample is identical."""

    def __init__(self, detail: str = "Degenerate ensemble", code: str = "degenerate_ensemble"):
        super().__init__(exit_code=EXIT_FAILURE, detail=detail, code=code)


class EmptyMaskError(JacobiMimoError):
    """Error raised when no reference point survives the KL mask."""

    def __init__(self, detail: str = "KL mask is empty", code: str = "empty_mask"):
        super().__init__(exit_code=EXIT_FAILURE, detail=detail, code=code)


class NoBracketError(JacobiMimoError):
    """Error raised when a moment ratio is outside the Weibull shape bracket."""

    def __init__(self, detail: str = "Weibull shape not bracketed", code: str = "no_bracket"):
        super().__init__(exit_code=EXIT_FAILURE, detail=detail, code=code)


class OutputError(JacobiMimoError):
    """Error raised when an output file cannot be written."""

    def __init__(self, detail: str = "Cannot write output", code: str = "output_error"):
        super().__init__(exit_code=EXIT_IO, detail=detail, code=code)


# PUBLIC_INTERFACE
def exit_code_for(exc: BaseException) -> int:
    """
    Map an exception to the documented process exit code.

    Args:
        exc: Any exception raised while running a command

    Returns:
        int: 2 for invalid configuration, 3 for numerical-consistency
        failures, 4 for I/O failures, 1 otherwise

    Example:
        ```python
        try:
            run()
        except Exception as exc:
            sys.exit(exit_code_for(exc))
        ```
    """
    if isinstance(exc, JacobiMimoError):
        return exc.exit_code
    if isinstance(exc, ValidationError):
        return EXIT_INVALID_CONFIG
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_FAILURE


# PUBLIC_INTERFACE
def describe(exc: BaseException) -> str:
    """
    Render an exception as a single-line diagnostic.

    Args:
        exc: Any exception raised while running a command

    Returns:
        str: ``"<code>: <detail>"`` without line breaks
    """
    if isinstance(exc, ValidationError):
        exc = InvalidConfigError.from_validation_error(exc)
    if isinstance(exc, JacobiMimoError):
        text = f"{exc.code}: {exc.detail}"
    else:
        text = f"{type(exc).__name__}: {exc}"
    return " ".join(text.split())
