"""
Spectral projectors (Frobenius covariants) of diagonalizable matrices.

For distinct eigenvalues λ₁..λₖ of a diagonalizable A,

    Gᵢ = Π_{j≠i} (A - λⱼI)/(λᵢ - λⱼ)

satisfy GᵢGⱼ = 0 (i≠j), Gᵢ² = Gᵢ, ΣGᵢ = I and ΣλᵢGᵢ = A. The eigenvector
similarity P (unitary for normal A, real orthogonal for real normal A with
real spectrum) is kept alongside so both realizations of a matrix function
can be computed and cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fracmat.config import get_settings
from fracmat.errors import DefectiveMatrixError, EigenvalueClusteringError
from fracmat.linalg.eigen import (
    Classification,
    MatrixClass,
    classify,
    eigen_decompose,
    normalize_phase,
)
from fracmat.linalg.matrix import CMatrix, as_cmatrix, frobenius, is_real
from fracmat.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SpectralData:
    """
    Spectral decomposition of a diagonalizable matrix.

    Attributes:
        eigenvalues: Distinct eigenvalues, ordered by (Re, Im)
        multiplicities: Algebraic multiplicity of each
        projectors: G_i for each distinct eigenvalue
        similarity: P with A = P diag(diagonal) P⁻¹; columns grouped by eigenvalue
        similarity_inverse: P⁻¹ (P* when unitary)
        diagonal: Eigenvalue belonging to each column of P
        is_unitary: Whether P is unitary
        is_real_orthogonal: Whether P is additionally real
        condition: 2-norm condition number of P
    """

    eigenvalues: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    projectors: tuple[CMatrix, ...]
    similarity: CMatrix
    similarity_inverse: CMatrix
    diagonal: tuple[complex, ...]
    is_unitary: bool
    is_real_orthogonal: bool
    condition: float

    @property
    def n(self) -> int:
        return int(self.similarity.shape[0])

    def reconstruct(self) -> CMatrix:
        """Σ λᵢ Gᵢ."""
        return sum(
            (lam * g for lam, g in zip(self.eigenvalues, self.projectors, strict=True)),
            np.zeros((self.n, self.n), dtype=complex),
        )

    def reconstruct_from_similarity(self) -> CMatrix:
        """P diag(λ) P⁻¹."""
        return (self.similarity * np.array(self.diagonal)[None, :]) @ self.similarity_inverse

    def invariant_residuals(self, matrix: CMatrix) -> dict[str, float]:
        """Frobenius residuals of the four projector identities."""
        identity = np.eye(self.n)
        k = len(self.projectors)
        orthogonality = max(
            (
                frobenius(self.projectors[i] @ self.projectors[j])
                for i in range(k)
                for j in range(k)
                if i != j
            ),
            default=0.0,
        )
        idempotency = max(frobenius(g @ g - g) for g in self.projectors)
        completeness = frobenius(sum(self.projectors, np.zeros_like(identity, dtype=complex)) - identity)
        reconstruction = frobenius(self.reconstruct() - matrix)
        return {
            "orthogonality": orthogonality,
            "idempotency": idempotency,
            "completeness": completeness,
            "reconstruction": reconstruction,
        }


def frobenius_covariants(matrix: CMatrix, eigenvalues: tuple[complex, ...]) -> tuple[CMatrix, ...]:
    """Gᵢ = Π_{j≠i}(A - λⱼI)/(λᵢ - λⱼ) over the given distinct eigenvalues."""
    n = matrix.shape[0]
    identity = np.eye(n, dtype=complex)
    projectors = []
    for i, lam_i in enumerate(eigenvalues):
        g = identity.copy()
        for j, lam_j in enumerate(eigenvalues):
            if j != i:
                g = g @ ((matrix - lam_j * identity) / (lam_i - lam_j))
        projectors.append(g)
    return tuple(projectors)


def spectral_projectors(matrix: CMatrix, classification: Classification | None = None) -> SpectralData:
    """
    Spectral projectors and eigenvector similarity of a diagonalizable A.

    Args:
        matrix: Square matrix
        classification: Result of classify(matrix), computed when omitted

    Raises:
        DefectiveMatrixError: If A is not diagonalizable
        EigenvalueClusteringError: If the projector identities fail because
            distinct eigenvalues were merged into one cluster
    """
    a = as_cmatrix(matrix)
    n = a.shape[0]
    settings = get_settings()
    kind = classification or classify(a)
    if not kind.is_diagonalizable:
        raise DefectiveMatrixError(
            f"Matrix is not diagonalizable (eigenvector condition {kind.condition_estimate:.3e})"
        )

    decomposition = eigen_decompose(a)
    if not decomposition.is_complete:
        raise DefectiveMatrixError(
            f"Only {decomposition.vectors.shape[1]} independent eigenvectors for n={n}"
        )

    eigenvalues = tuple(c.value for c in decomposition.clusters)
    multiplicities = tuple(c.multiplicity for c in decomposition.clusters)
    projectors = frobenius_covariants(a, eigenvalues)
    diagonal = tuple(eigenvalues[i] for i in decomposition.column_cluster)

    vectors = decomposition.vectors
    real_orthogonal = False
    if kind.kind is MatrixClass.NORMAL:
        q, _ = np.linalg.qr(vectors)
        p = np.column_stack([normalize_phase(q[:, k]) for k in range(n)])
        if is_real(a) and all(lam.imag == 0 for lam in eigenvalues):
            p = p.real.astype(complex)
            real_orthogonal = True
        p_inverse = p.conj().T
        unitary = True
    else:
        p = vectors
        p_inverse = np.linalg.inv(p)
        unitary = frobenius(p.conj().T @ p - np.eye(n)) <= settings.tolerances.projector

    data = SpectralData(
        eigenvalues=eigenvalues,
        multiplicities=multiplicities,
        projectors=projectors,
        similarity=p,
        similarity_inverse=p_inverse,
        diagonal=diagonal,
        is_unitary=unitary,
        is_real_orthogonal=real_orthogonal,
        condition=float(np.linalg.cond(p)),
    )

    residuals = data.invariant_residuals(a)
    limit = settings.tolerances.projector * max(1.0, frobenius(a)) * data.condition
    worst = max(residuals.values())
    if worst > limit:
        merged = [c for c in decomposition.clusters if c.multiplicity > 1 and c.spread > 0]
        if merged:
            raise EigenvalueClusteringError(
                f"Projector identities fail (residual {worst:.3e}); eigenvalues near "
                f"{merged[0].value} were merged but behave as distinct"
            )
        logger.warning("Projector identity residual %.3e exceeds %.3e", worst, limit)

    logger.debug(
        "spectral_projectors: %d distinct eigenvalues, cond(P)=%.3e, unitary=%s",
        len(eigenvalues),
        data.condition,
        unitary,
    )
    return data
