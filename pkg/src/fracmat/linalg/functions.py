"""
Matrix functions g(A).

- normal A: U diag(g(λ)) U*
- diagonalizable A: P diag(g(λ)) P⁻¹
- both of the above are cross-checked against the spectral sum Σ g(λᵢ) Gᵢ
- defective A: P blockdiag(g(J)) P⁻¹, where g(J(λ)) for an s×s segment is
  upper triangular with g⁽ᵏ⁾(λ)/k! on the k-th superdiagonal
"""

from __future__ import annotations

import cmath
from collections.abc import Callable
from dataclasses import dataclass
from math import factorial

import numpy as np

from fracmat.config import get_settings
from fracmat.errors import DerivativeUnavailableError, MatrixFunctionMismatchError
from fracmat.linalg.eigen import classify
from fracmat.linalg.jordan import JordanData, jordan_decompose
from fracmat.linalg.matrix import CMatrix, as_cmatrix, frobenius
from fracmat.linalg.spectral import SpectralData, spectral_projectors
from fracmat.logging_config import get_logger

logger = get_logger(__name__)

ScalarFunction = Callable[[complex], complex]


@dataclass(frozen=True)
class FunctionWithDerivatives:
    """
    A scalar function with its first few derivatives.

    Attributes:
        value: z -> g(z)
        derivatives: (g', g'', ...) in order; may be empty
        name: Label for error messages
    """

    value: ScalarFunction
    derivatives: tuple[ScalarFunction, ...] = ()
    name: str = "g"

    def derivative(self, k: int) -> ScalarFunction:
        """The k-th derivative (k = 0 is the function itself)."""
        if k == 0:
            return self.value
        if k <= len(self.derivatives):
            return self.derivatives[k - 1]
        raise DerivativeUnavailableError(
            f"{self.name} provides {len(self.derivatives)} derivative(s); order {k} is needed"
        )

    @classmethod
    def exponential(cls) -> FunctionWithDerivatives:
        return cls(cmath.exp, (cmath.exp, cmath.exp, cmath.exp), name="exp")

    @classmethod
    def power(cls, k: int) -> FunctionWithDerivatives:
        """z^k with all its non-trivial derivatives."""

        def nth(j: int) -> ScalarFunction:
            scale = factorial(k) // factorial(k - j)
            return lambda z: scale * complex(z) ** (k - j)

        return cls(nth(0), tuple(nth(j) for j in range(1, k + 1)), name=f"z^{k}")


def _spectral_sum(data: SpectralData, g: FunctionWithDerivatives) -> CMatrix:
    total = np.zeros((data.n, data.n), dtype=complex)
    for lam, projector in zip(data.eigenvalues, data.projectors, strict=True):
        total += g.value(lam) * projector
    return total


def _similarity_form(data: SpectralData, g: FunctionWithDerivatives) -> CMatrix:
    values = np.array([g.value(lam) for lam in data.diagonal], dtype=complex)
    return (data.similarity * values[None, :]) @ data.similarity_inverse


def _jordan_form(data: JordanData, g: FunctionWithDerivatives) -> CMatrix:
    n = data.n
    blocks = np.zeros((n, n), dtype=complex)
    for seg in data.segments:
        for k in range(seg.size):
            coeff = g.derivative(k)(seg.eigenvalue) / factorial(k)
            for r in range(seg.size - k):
                blocks[seg.start + r, seg.start + r + k] = coeff
    return data.similarity @ blocks @ data.similarity_inverse


def matrix_function(matrix: CMatrix, g: FunctionWithDerivatives) -> CMatrix:
    """
    Evaluate g(A).

    Raises:
        MatrixFunctionMismatchError: If the similarity and spectral forms
            disagree beyond tolerances.matrix_function (scaled by cond(P))
        DerivativeUnavailableError: If A is defective and g lacks a needed
            derivative
    """
    a = as_cmatrix(matrix)
    classification = classify(a)

    if not classification.is_diagonalizable:
        data = jordan_decompose(a)
        needed = data.largest_segment - 1
        if needed > len(g.derivatives):
            raise DerivativeUnavailableError(
                f"Jordan segment of size {data.largest_segment} needs {needed} derivative(s) "
                f"of {g.name}; {len(g.derivatives)} available"
            )
        return _jordan_form(data, g)

    spectral = spectral_projectors(a, classification)
    by_similarity = _similarity_form(spectral, g)
    by_projectors = _spectral_sum(spectral, g)

    difference = frobenius(by_similarity - by_projectors)
    limit = (
        get_settings().tolerances.matrix_function
        * spectral.condition
        * max(1.0, frobenius(by_similarity))
    )
    if difference > limit:
        raise MatrixFunctionMismatchError(
            f"Similarity and spectral evaluations of {g.name}(A) differ by {difference:.3e} "
            f"(limit {limit:.3e})"
        )
    logger.debug("matrix_function %s: paths agree to %.3e", g.name, difference)
    return by_similarity
