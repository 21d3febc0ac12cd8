"""
Jordan decomposition of small matrices.

For each distinct eigenvalue λ (eigenvalues merged at linalg.jordan_cluster_tol)
the ranks of Nᵏ = (A - λI)ᵏ give the block structure: the number of blocks
of size >= k is rank(Nᵏ⁻¹) - rank(Nᵏ). Chains are grown from the largest
blocks down: a chain top t of length k is taken from ker Nᵏ outside
ker Nᵏ⁻¹ and the levels already used by longer chains, and the chain's
columns are Nᵏ⁻¹t, ..., Nt, t so that A P = P J with ones on J's
superdiagonal.

Jordan structure is discontinuous in the entries, so any singular value
within a factor of 10 of the rank threshold is reported as ambiguous
instead of being guessed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from fracmat.config import get_settings
from fracmat.errors import AmbiguousJordanStructureError, JordanReconstructionError
from fracmat.linalg.eigen import cluster_eigenvalues, normalize_phase, qr_eigenvalues
from fracmat.linalg.matrix import CMatrix, as_cmatrix, frobenius, is_real
from fracmat.logging_config import get_logger

logger = get_logger(__name__)

# Singular values within this factor of the threshold make the rank ambiguous
_AMBIGUITY_FACTOR = 10.0


@dataclass(frozen=True)
class JordanSegment:
    """A Jordan block J(λ) of the given size starting at column `start` of P."""

    eigenvalue: complex
    size: int
    start: int

    def block(self) -> CMatrix:
        return self.eigenvalue * np.eye(self.size, dtype=complex) + np.eye(self.size, k=1)


@dataclass(frozen=True)
class JordanData:
    """
    A = P J P⁻¹ with J block diagonal.

    Attributes:
        similarity: P
        similarity_inverse: P⁻¹
        segments: Blocks ordered by eigenvalue (Re, Im), then decreasing size
        condition: 2-norm condition number of P
        reconstruction_residual: ‖PJP⁻¹ - A‖_F / ‖A‖_F
    """

    similarity: CMatrix
    similarity_inverse: CMatrix
    segments: tuple[JordanSegment, ...]
    condition: float
    reconstruction_residual: float

    @property
    def n(self) -> int:
        return int(self.similarity.shape[0])

    @property
    def largest_segment(self) -> int:
        return max(s.size for s in self.segments)

    @property
    def has_nontrivial_segment(self) -> bool:
        return self.largest_segment >= 2

    def jordan_matrix(self) -> CMatrix:
        j = np.zeros((self.n, self.n), dtype=complex)
        for seg in self.segments:
            j[seg.start : seg.start + seg.size, seg.start : seg.start + seg.size] = seg.block()
        return j

    def reconstruct(self) -> CMatrix:
        return self.similarity @ self.jordan_matrix() @ self.similarity_inverse


def _rank(m: CMatrix, threshold: float, context: str) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    near = (s > threshold / _AMBIGUITY_FACTOR) & (s <= threshold * _AMBIGUITY_FACTOR)
    if np.any(near):
        raise AmbiguousJordanStructureError(
            f"{context}: singular value {float(s[near][0]):.3e} is within a factor of "
            f"{_AMBIGUITY_FACTOR:g} of the rank threshold {threshold:.3e}"
        )
    return int(np.sum(s > threshold))


def _kernel(m: CMatrix, threshold: float) -> CMatrix:
    _, s, vh = np.linalg.svd(m)
    nullity = int(np.sum(s <= threshold))
    return vh[vh.shape[0] - nullity :].conj().T


def _orthonormal_basis(columns: list[NDArray[np.complex128]], n: int) -> CMatrix:
    if not columns:
        return np.zeros((n, 0), dtype=complex)
    u, s, _ = np.linalg.svd(np.column_stack(columns), full_matrices=False)
    keep = s > 1e-10 * max(1.0, float(s[0]))
    return u[:, keep]


def _chains_for_eigenvalue(
    a: CMatrix, lam: complex, multiplicity: int, threshold: float
) -> list[list[NDArray[np.complex128]]]:
    """Jordan chains [v₁, ..., vₖ] for one eigenvalue, longest first."""
    n = a.shape[0]
    nil = a - lam * np.eye(n)
    nil_norm = max(1.0, float(np.linalg.norm(nil, 2)))

    powers = [np.eye(n, dtype=complex)]
    for _ in range(multiplicity):
        powers.append(powers[-1] @ nil)
    thresholds = [threshold * nil_norm ** max(k - 1, 0) for k in range(multiplicity + 1)]

    context = f"eigenvalue {lam:.6g}"
    ranks = [n] + [
        _rank(powers[k], thresholds[k], context) for k in range(1, multiplicity + 1)
    ]
    if n - ranks[multiplicity] != multiplicity:
        raise AmbiguousJordanStructureError(
            f"{context}: generalized eigenspace has dimension {n - ranks[multiplicity]} "
            f"but the eigenvalue has multiplicity {multiplicity}"
        )

    at_least = [ranks[k - 1] - ranks[k] for k in range(1, multiplicity + 1)] + [0]
    if any(at_least[k] < at_least[k + 1] for k in range(multiplicity)):
        raise AmbiguousJordanStructureError(f"{context}: inconsistent rank sequence {ranks}")

    kernels = [np.zeros((n, 0), dtype=complex)] + [
        _kernel(powers[k], thresholds[k]) for k in range(1, multiplicity + 1)
    ]

    tops: list[tuple[int, NDArray[np.complex128]]] = []
    for k in range(multiplicity, 0, -1):
        new_chains = at_least[k - 1] - at_least[k]
        if new_chains == 0:
            continue
        used = [kernels[k - 1][:, i] for i in range(kernels[k - 1].shape[1])]
        used += [np.linalg.matrix_power(nil, length - k) @ t for length, t in tops]
        w = _orthonormal_basis(used, n)
        candidates = kernels[k] - w @ (w.conj().T @ kernels[k])
        u, s, _ = np.linalg.svd(candidates, full_matrices=False)
        if s.shape[0] < new_chains or s[new_chains - 1] <= threshold:
            raise AmbiguousJordanStructureError(
                f"{context}: cannot find {new_chains} independent chain(s) of length {k}"
            )
        for i in range(new_chains):
            top = normalize_phase(u[:, i])
            head = np.linalg.matrix_power(nil, k - 1) @ top
            top = top / np.linalg.norm(head)
            tops.append((k, top))

    return [
        [np.linalg.matrix_power(nil, length - j) @ t for j in range(1, length + 1)]
        for length, t in tops
    ]


def jordan_decompose(matrix: CMatrix, tol: float | None = None) -> JordanData:
    """
    Jordan decomposition A = P J P⁻¹ for n <= linalg.max_jordan_dimension.

    Args:
        matrix: Square matrix
        tol: Relative singular-value threshold for ranks; defaults to
            linalg.rank_tol (scaled by max(1, ‖A‖_F))

    Raises:
        MatrixShapeError: If n exceeds the Jordan dimension cap
        AmbiguousJordanStructureError: If the block structure cannot be
            decided reliably
        JordanReconstructionError: If PJP⁻¹ misses A by more than the
            reconstruction tolerance
    """
    settings = get_settings()
    a = as_cmatrix(matrix, max_dimension=settings.linalg.max_jordan_dimension)
    n = a.shape[0]
    norm_a = frobenius(a)
    threshold = (settings.linalg.rank_tol if tol is None else tol) * max(1.0, norm_a)

    clusters = cluster_eigenvalues(
        qr_eigenvalues(a),
        settings.linalg.jordan_cluster_tol * max(1.0, norm_a),
        is_real(a),
    )

    columns: list[NDArray[np.complex128]] = []
    segments: list[JordanSegment] = []
    for cluster in clusters:
        for chain in _chains_for_eigenvalue(a, cluster.value, cluster.multiplicity, threshold):
            segments.append(JordanSegment(cluster.value, len(chain), len(columns)))
            columns.extend(chain)

    if len(columns) != n:
        raise AmbiguousJordanStructureError(f"Found {len(columns)} chain vectors for n={n}")

    p = np.column_stack(columns)
    condition = float(np.linalg.cond(p))
    if not np.isfinite(condition):
        raise AmbiguousJordanStructureError("Chain vectors are linearly dependent")
    p_inverse = np.linalg.inv(p)

    data = JordanData(p, p_inverse, tuple(segments), condition, 0.0)
    residual = frobenius(data.reconstruct() - a)
    relative = residual / norm_a if norm_a > 0 else residual
    if relative > settings.tolerances.reconstruction:
        raise JordanReconstructionError(
            f"Jordan reconstruction residual {relative:.3e} exceeds "
            f"{settings.tolerances.reconstruction:.1e} (cond(P)={condition:.3e})"
        )

    logger.debug(
        "jordan_decompose: segments %s, cond(P)=%.3e",
        [(complex(s.eigenvalue), s.size) for s in segments],
        condition,
    )
    return JordanData(p, p_inverse, tuple(segments), condition, relative)
