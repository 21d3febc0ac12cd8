"""
Exception hierarchy for fracmat.

Every error raised on purpose by the library derives from ``FracmatError`` so
the CLI can tell domain failures apart from programming errors. Each class
also derives from the closest builtin (``ValueError`` for rejected input,
``ArithmeticError`` for numerical breakdown) so callers that only know the
builtins keep working.
"""

from __future__ import annotations


class FracmatError(Exception):
    """Base class for all fracmat errors."""


# =============================================================================
# Special functions and symbolic engine
# =============================================================================


class PoleError(FracmatError, ArithmeticError):
    """Raised when a gamma-family function is evaluated at a pole."""


class ExponentDomainError(FracmatError, ValueError):
    """Raised when a power term lies outside the Riemann-Liouville domain (Re p <= -1)."""


class LogPowerOverflowError(FracmatError, ValueError):
    """Raised when an operation would produce ln^m with m above the supported cap."""


class BasePointMismatchError(FracmatError, ValueError):
    """Raised when expressions anchored at different base points are combined."""


class NonPolynomialError(FracmatError, ValueError):
    """Raised when a terminating Leibniz series is requested for a non-polynomial factor."""


class DivergentBoundaryError(FracmatError, ArithmeticError):
    """Raised when a boundary limit at x -> a+ does not exist."""


class SerializationError(FracmatError, ValueError):
    """Raised when a JSON document does not match the documented schema."""


# =============================================================================
# Numerical oracle
# =============================================================================


class OracleDomainError(FracmatError, ValueError):
    """Raised when oracle arguments violate their preconditions."""


class NonFiniteSampleError(FracmatError, ArithmeticError):
    """Raised when a sampled function returns NaN or Inf inside its domain."""


class QuadratureConvergenceError(FracmatError, ArithmeticError):
    """Raised when successive quadrature refinements keep disagreeing."""


# =============================================================================
# Linear algebra
# =============================================================================


class MatrixShapeError(FracmatError, ValueError):
    """Raised for non-square, empty, oversized or non-finite matrices."""


class EigenNonConvergenceError(FracmatError, ArithmeticError):
    """Raised when shifted QR iteration exceeds its iteration cap."""


class DefectiveMatrixError(FracmatError, ValueError):
    """Raised when a diagonalizable matrix is required but the input is defective."""


class EigenvalueClusteringError(FracmatError, ArithmeticError):
    """Raised when clustered eigenvalues do not span a consistent eigenspace."""


class AmbiguousJordanStructureError(FracmatError, ArithmeticError):
    """Raised when singular values straddle the rank threshold."""


class JordanReconstructionError(FracmatError, ArithmeticError):
    """Raised when P J P^-1 fails to reproduce the input matrix."""


class DerivativeUnavailableError(FracmatError, ValueError):
    """Raised when a matrix function lacks derivatives required by a Jordan block."""


class MatrixFunctionMismatchError(FracmatError, ArithmeticError):
    """Raised when the similarity and spectral evaluations of g(A) disagree."""


# =============================================================================
# Operators and tasks
# =============================================================================


class JordanDepthError(FracmatError, ValueError):
    """Raised when a Jordan segment needs order-derivatives beyond the supported depth."""


class PreconditionError(FracmatError, ValueError):
    """Raised when a law check is invoked outside the setting where the law holds."""


class TaskSpecError(FracmatError, ValueError):
    """Raised when a TaskSpec document fails validation.

    Attributes:
        path: Dotted path of the offending field (e.g. ``grid.start``)
    """

    def __init__(self, path: str, message: str) -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
