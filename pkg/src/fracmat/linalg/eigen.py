"""
Eigenvalues, eigenvectors and matrix classification.

Eigenvalues come from a Householder reduction to Hessenberg form followed
by single-shift complex QR iteration (Wilkinson shifts, occasional
exceptional shifts, deflation on negligible subdiagonals). Eigenvectors of
simple eigenvalues come from inverse iteration; repeated eigenvalues get an
orthonormal null-space basis from the SVD.

Eigenvalues closer than cluster_tol·‖A‖_F are one distinct eigenvalue
(their mean). Distinct eigenvalues are ordered by (Re, Im) everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from fracmat.config import get_settings
from fracmat.errors import EigenNonConvergenceError
from fracmat.linalg.matrix import CMatrix, as_cmatrix, frobenius, is_real
from fracmat.logging_config import get_logger

logger = get_logger(__name__)

EPS = float(np.finfo(float).eps)

# Iterations on one eigenvalue after which an exceptional shift is used
_EXCEPTIONAL_SHIFT_EVERY = 10


class MatrixClass(StrEnum):
    """Nested matrix classes: every normal matrix is diagonalizable."""

    NORMAL = "normal"
    DIAGONALIZABLE = "diagonalizable"
    JORDAN = "jordan"


@dataclass(frozen=True)
class Classification:
    """
    Result of classify().

    Attributes:
        kind: The narrowest class A belongs to
        commutator_norm: ‖AA* - A*A‖_F
        condition_estimate: 2-norm condition number of the eigenvector
            basis (1.0 for normal matrices, inf when the basis is deficient)
        normal_tol: Relative commutator tolerance used
        condition_cap: Condition number above which A counts as defective
    """

    kind: MatrixClass
    commutator_norm: float
    condition_estimate: float
    normal_tol: float
    condition_cap: float

    @property
    def is_diagonalizable(self) -> bool:
        return self.kind is not MatrixClass.JORDAN


@dataclass(frozen=True)
class EigenCluster:
    """One distinct eigenvalue and the raw QR eigenvalues merged into it."""

    value: complex
    members: tuple[complex, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)

    @property
    def spread(self) -> float:
        return max(abs(m - self.value) for m in self.members)


@dataclass(frozen=True)
class EigenDecomposition:
    """
    Eigenvalues with eigenvectors.

    Attributes:
        eigenvalues: All n eigenvalues (with multiplicity), sorted by (Re, Im)
        clusters: Distinct eigenvalues in the same order
        vectors: Unit eigenvectors as columns, grouped by cluster; fewer than
            n columns when A is defective
        column_cluster: Cluster index of each column of vectors
    """

    eigenvalues: NDArray[np.complex128]
    clusters: tuple[EigenCluster, ...]
    vectors: CMatrix
    column_cluster: tuple[int, ...]

    @property
    def is_complete(self) -> bool:
        return self.vectors.shape[1] == self.eigenvalues.shape[0]


# =============================================================================
# Hessenberg reduction and QR iteration
# =============================================================================


def hessenberg(matrix: CMatrix) -> tuple[CMatrix, CMatrix]:
    """
    Householder reduction A = Q H Q* with H upper Hessenberg and Q unitary.
    """
    h = np.array(matrix, dtype=complex)
    n = h.shape[0]
    q = np.eye(n, dtype=complex)
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * norm_x
        v /= np.linalg.norm(v)
        h[k + 1 :, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, :])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        q[:, k + 1 :] -= 2.0 * np.outer(q[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h, q


def _wilkinson_shift(block: CMatrix) -> complex:
    a, b = block[0, 0], block[0, 1]
    c, d = block[1, 0], block[1, 1]
    half_trace = 0.5 * (a + d)
    disc = np.sqrt(0.25 * (a - d) ** 2 + b * c)
    first, second = half_trace + disc, half_trace - disc
    return complex(first if abs(first - d) <= abs(second - d) else second)


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """(c, s) such that [[c, s], [-conj(s), c]] maps (a, b) to (r, 0)."""
    r = math.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0, 0j
    if a == 0:
        return 0.0, 1.0 + 0j
    c = abs(a) / r
    s = (a / abs(a)) * np.conj(b) / r
    return c, complex(s)


def _qr_step(h: CMatrix, lo: int, hi: int, shift: complex) -> None:
    """One shifted QR step on the active block h[lo:hi+1, lo:hi+1], in place."""
    block = h[lo : hi + 1, lo : hi + 1]
    m = block.shape[0]
    block[np.diag_indices(m)] -= shift

    rotations = []
    for k in range(m - 1):
        c, s = _givens(block[k, k], block[k + 1, k])
        top = block[k, k:].copy()
        bottom = block[k + 1, k:].copy()
        block[k, k:] = c * top + s * bottom
        block[k + 1, k:] = -np.conj(s) * top + c * bottom
        rotations.append((c, s))

    for k, (c, s) in enumerate(rotations):
        rows = slice(0, min(k + 2, m))
        left = block[rows, k].copy()
        right = block[rows, k + 1].copy()
        block[rows, k] = c * left + np.conj(s) * right
        block[rows, k + 1] = -s * left + c * right

    block[np.diag_indices(m)] += shift


def qr_eigenvalues(matrix: CMatrix, max_sweeps: int | None = None) -> NDArray[np.complex128]:
    """
    All eigenvalues of a square matrix, unsorted.

    Raises:
        EigenNonConvergenceError: If the iteration cap (max_sweeps per
            eigenvalue) is exhausted
    """
    sweeps = max_sweeps if max_sweeps is not None else get_settings().linalg.qr_max_sweeps
    h, _ = hessenberg(matrix)
    n = h.shape[0]
    eigenvalues = np.zeros(n, dtype=complex)
    scale = max(frobenius(h), np.finfo(float).tiny)
    cap = sweeps * n

    hi = n - 1
    since_deflation = 0
    total = 0
    while hi >= 0:
        if hi == 0:
            eigenvalues[0] = h[0, 0]
            break

        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = scale
            if abs(h[lo, lo - 1]) <= EPS * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1

        if lo == hi:
            eigenvalues[hi] = h[hi, hi]
            hi -= 1
            since_deflation = 0
            continue

        if total >= cap:
            raise EigenNonConvergenceError(
                f"Shifted QR did not converge within {cap} iterations (n={n})"
            )
        since_deflation += 1
        total += 1
        if since_deflation % _EXCEPTIONAL_SHIFT_EVERY == 0:
            shift = complex(h[hi, hi] + 0.75 * abs(h[hi, hi - 1]))
        else:
            shift = _wilkinson_shift(h[hi - 1 : hi + 1, hi - 1 : hi + 1])
        _qr_step(h, lo, hi, shift)

    logger.debug("QR converged after %d iterations (n=%d)", total, n)
    return eigenvalues


# =============================================================================
# Clustering and eigenvectors
# =============================================================================


def _sort_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def cluster_eigenvalues(
    values: NDArray[np.complex128], tol: float, real_input: bool = False
) -> tuple[EigenCluster, ...]:
    """
    Merge eigenvalues within tol of each other (single linkage).

    For real input, clusters whose mean has |Im| <= tol are put on the real
    axis.
    """
    items = sorted((complex(v) for v in values), key=_sort_key)
    n = len(items)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(items[i] - items[j]) <= tol:
                parent[find(j)] = find(i)

    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(items[i])

    clusters = []
    for members in groups.values():
        mean = complex(sum(members) / len(members))
        if real_input and abs(mean.imag) <= tol:
            mean = complex(mean.real, 0.0)
        clusters.append(EigenCluster(mean, tuple(members)))
    return tuple(sorted(clusters, key=lambda c: _sort_key(c.value)))


def rank_threshold(matrix: CMatrix) -> float:
    """Singular values at or below this count as zero."""
    return get_settings().linalg.rank_tol * max(1.0, frobenius(matrix))


def null_space(m: CMatrix, threshold: float) -> tuple[CMatrix, NDArray[np.float64]]:
    """Orthonormal basis (columns) of the numerical null space, plus the singular values."""
    _, s, vh = np.linalg.svd(m)
    nullity = int(np.sum(s <= threshold))
    basis = vh[vh.shape[0] - nullity :].conj().T if nullity else np.zeros((m.shape[0], 0), complex)
    return basis, s


def normalize_phase(v: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """Unit norm with the largest component real and positive."""
    v = v / np.linalg.norm(v)
    pivot = v[int(np.argmax(np.abs(v)))]
    return v * (abs(pivot) / pivot)


def _inverse_iteration(matrix: CMatrix, value: complex, threshold: float) -> NDArray[np.complex128]:
    n = matrix.shape[0]
    scale = max(1.0, frobenius(matrix))
    shifted = matrix - (value + 1e3 * EPS * scale) * np.eye(n)
    b = (1.0 + np.arange(n) / n).astype(complex)
    b /= np.linalg.norm(b)
    try:
        for _ in range(3):
            y = np.linalg.solve(shifted, b)
            if not np.all(np.isfinite(y)):
                raise np.linalg.LinAlgError("non-finite iterate")
            b = y / np.linalg.norm(y)
    except np.linalg.LinAlgError:
        basis, _ = null_space(matrix - value * np.eye(n), threshold)
        if basis.shape[1] == 0:
            _, _, vh = np.linalg.svd(matrix - value * np.eye(n))
            return normalize_phase(vh[-1].conj())
        return normalize_phase(basis[:, 0])
    return normalize_phase(b)


def eigen_decompose(matrix: CMatrix, cluster_tol: float | None = None) -> EigenDecomposition:
    """
    Eigenvalues and (as many as exist) unit eigenvectors of A.

    Args:
        matrix: Square matrix, n <= linalg.max_dimension
        cluster_tol: Relative merge tolerance; defaults to linalg.cluster_tol

    Raises:
        MatrixShapeError: If A is not a valid square matrix
        EigenNonConvergenceError: If QR iteration does not converge
    """
    a = as_cmatrix(matrix)
    n = a.shape[0]
    settings = get_settings().linalg
    norm_a = frobenius(a)
    tol = (cluster_tol if cluster_tol is not None else settings.cluster_tol) * norm_a
    real_input = is_real(a)

    raw = qr_eigenvalues(a)
    clusters = cluster_eigenvalues(raw, tol, real_input)
    eigenvalues = np.array(
        [c.value for c in clusters for _ in range(c.multiplicity)], dtype=complex
    )

    threshold = rank_threshold(a)
    columns: list[NDArray[np.complex128]] = []
    owner: list[int] = []
    for index, cluster in enumerate(clusters):
        real_pair = real_input and cluster.value.imag == 0.0
        if cluster.multiplicity == 1:
            vector = _inverse_iteration(a, cluster.value, threshold)
            columns.append(vector.real.astype(complex) if real_pair else vector)
            owner.append(index)
            continue
        shifted = a - cluster.value * np.eye(n)
        basis, _ = null_space(shifted.real if real_pair else shifted, threshold)
        for k in range(min(basis.shape[1], cluster.multiplicity)):
            columns.append(normalize_phase(basis[:, k].astype(complex)))
            owner.append(index)

    vectors = np.column_stack(columns) if columns else np.zeros((n, 0), complex)
    logger.debug(
        "eigen_decompose: n=%d, %d distinct eigenvalues, %d eigenvectors",
        n,
        len(clusters),
        vectors.shape[1],
    )
    return EigenDecomposition(eigenvalues, clusters, vectors, tuple(owner))


# =============================================================================
# Classification
# =============================================================================


def commutator_norm(matrix: CMatrix) -> float:
    """‖AA* - A*A‖_F."""
    adjoint = matrix.conj().T
    return frobenius(matrix @ adjoint - adjoint @ matrix)


def _coarse_deficient(matrix: CMatrix) -> bool:
    """True when eigenvalues merged at the loose tolerance lack eigenvectors."""
    settings = get_settings().linalg
    n = matrix.shape[0]
    tol = settings.jordan_cluster_tol * max(1.0, frobenius(matrix))
    threshold = rank_threshold(matrix)
    for cluster in cluster_eigenvalues(qr_eigenvalues(matrix), tol):
        if cluster.multiplicity == 1:
            continue
        basis, _ = null_space(matrix - cluster.value * np.eye(n), threshold)
        if basis.shape[1] < cluster.multiplicity:
            return True
    return False


def classify(matrix: CMatrix, tol: float | None = None) -> Classification:
    """
    Place A in the narrowest of normal / diagonalizable / Jordan-only.

    Normal iff ‖AA* - A*A‖_F <= tol·‖A‖_F². Diagonalizable iff a full
    eigenvector basis exists with condition number below linalg.condition_cap
    (and, for a poorly conditioned basis, no loosely clustered eigenvalue is
    short of eigenvectors). Everything else is Jordan-only.
    """
    a = as_cmatrix(matrix)
    settings = get_settings().linalg
    normal_tol = settings.normal_tol if tol is None else tol
    cap = settings.condition_cap

    comm = commutator_norm(a)
    if comm <= normal_tol * frobenius(a) ** 2:
        return Classification(MatrixClass.NORMAL, comm, 1.0, normal_tol, cap)

    decomposition = eigen_decompose(a)
    if not decomposition.is_complete:
        kind = MatrixClass.JORDAN
        condition = math.inf
    else:
        condition = float(np.linalg.cond(decomposition.vectors))
        if condition > cap or (condition > math.sqrt(cap) and _coarse_deficient(a)):
            kind = MatrixClass.JORDAN
        else:
            kind = MatrixClass.DIAGONALIZABLE

    logger.debug("classify: %s (commutator %.3e, condition %.3e)", kind, comm, condition)
    return Classification(kind, comm, condition, normal_tol, cap)
