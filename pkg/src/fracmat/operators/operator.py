"""
Matrix-order differintegral D^A anchored at a base point.

An operator is stored as a list of weighted scalar actions

    D^A = Σ W · (∂ᵏ/∂λᵏ D^λ) / k!

where each term carries an order λ, an order-derivative index k and an n×n
weight W. Three realizations produce such lists:

- spectral: Σ Gᵢ D^{λᵢ} over distinct eigenvalues (k = 0 throughout)
- similarity: one rank-one weight P[:, c] P⁻¹[c, :] per column of P
- jordan: P blockdiag(Tᵢ) P⁻¹, where the k-th superdiagonal of a segment's
  block carries ∂ᵏ/∂λᵏ D^λ / k!

Applying the operator to an Expression f gives the n×n MatrixExprFunction
whose (r, c) entry is Σ W[r, c] · action(f). Applying it to a vector or a
matrix of Expressions contracts W against the argument's rows.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from math import factorial
from typing import Any

import numpy as np

from fracmat._parallel import parallel_map
from fracmat.errors import (
    AmbiguousJordanStructureError,
    JordanDepthError,
    MatrixShapeError,
    PreconditionError,
)
from fracmat.linalg import (
    CMatrix,
    Classification,
    JordanData,
    MatrixClass,
    SpectralData,
    as_cmatrix,
    classify,
    jordan_decompose,
    matrix_to_json,
    spectral_projectors,
)
from fracmat.logging_config import get_logger
from fracmat.observability import instrument
from fracmat.operators.functions import MatrixExprFunction, VectorExprFunction
from fracmat.symbolic import Expression, PowerLogTerm, differint_expr, lambda_derivative

logger = get_logger(__name__)

# Largest order-derivative a Jordan segment may need (segment size - 1)
MAX_JORDAN_DEPTH = 3


class Realization(StrEnum):
    """How the operator was realized from A."""

    UNITARY = "unitary"
    ORTHOGONAL = "orthogonal"
    SIMILARITY = "similarity"
    JORDAN = "jordan"


class ApplyPath(StrEnum):
    """Which weight list to use when applying an operator."""

    SPECTRAL = "spectral"
    SIMILARITY = "similarity"
    JORDAN = "jordan"


@dataclass(frozen=True, eq=False)
class OperatorTerm:
    """W · ∂ᵏ/∂λᵏ D^λ, with 1/k! already folded into the weight."""

    order: complex
    derivative: int
    weight: CMatrix

    @property
    def action_key(self) -> tuple[complex, int]:
        return (self.order, self.derivative)


def scalar_action(f: Expression, order: complex, derivative: int) -> Expression:
    """D^λ f, or its k-th derivative in λ."""
    if derivative == 0:
        return differint_expr(f, order)
    return lambda_derivative(f, order, derivative)


@dataclass(frozen=True, eq=False)
class MatrixOrderOperator:
    """
    D^A with its decomposition.

    Attributes:
        base_point: Lower limit a
        matrix: A
        classification: Result of classify(A)
        realization: Tag recording which similarity realizes A
        spectral: Projectors and similarity (diagonalizable A only)
        jordan: Jordan similarity and segments (defective A only)
    """

    base_point: float
    matrix: CMatrix
    classification: Classification
    realization: Realization
    spectral: SpectralData | None = None
    jordan: JordanData | None = None

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def default_path(self) -> ApplyPath:
        return ApplyPath.JORDAN if self.jordan is not None else ApplyPath.SPECTRAL

    @property
    def condition(self) -> float:
        """Condition number of the similarity (1 for unitary realizations)."""
        data = self.spectral if self.spectral is not None else self.jordan
        assert data is not None
        return max(1.0, data.condition)

    @property
    def eigenvalues(self) -> tuple[complex, ...]:
        """Eigenvalues with multiplicity in the deterministic decomposition order."""
        if self.spectral is not None:
            return self.spectral.diagonal
        assert self.jordan is not None
        return tuple(s.eigenvalue for s in self.jordan.segments for _ in range(s.size))

    @cached_property
    def _spectral_terms(self) -> tuple[OperatorTerm, ...]:
        data = self._require_spectral(ApplyPath.SPECTRAL)
        return tuple(
            OperatorTerm(complex(lam), 0, g)
            for lam, g in zip(data.eigenvalues, data.projectors, strict=True)
        )

    @cached_property
    def _similarity_terms(self) -> tuple[OperatorTerm, ...]:
        data = self._require_spectral(ApplyPath.SIMILARITY)
        p, p_inverse = data.similarity, data.similarity_inverse
        return tuple(
            OperatorTerm(complex(lam), 0, np.outer(p[:, c], p_inverse[c, :]))
            for c, lam in enumerate(data.diagonal)
        )

    @cached_property
    def _jordan_terms(self) -> tuple[OperatorTerm, ...]:
        if self.jordan is None:
            raise PreconditionError("The jordan path needs a defective order matrix")
        p, p_inverse = self.jordan.similarity, self.jordan.similarity_inverse
        terms = []
        for seg in self.jordan.segments:
            if seg.size - 1 > MAX_JORDAN_DEPTH:
                raise JordanDepthError(
                    f"Jordan segment of size {seg.size} at {seg.eigenvalue} needs order-derivatives "
                    f"up to {seg.size - 1}; at most {MAX_JORDAN_DEPTH} are supported"
                )
            for k in range(seg.size):
                weight = np.zeros((self.n, self.n), dtype=complex)
                for r in range(seg.size - k):
                    weight += np.outer(p[:, seg.start + r], p_inverse[seg.start + r + k, :])
                terms.append(OperatorTerm(complex(seg.eigenvalue), k, weight / factorial(k)))
        return tuple(terms)

    def _require_spectral(self, path: ApplyPath) -> SpectralData:
        if self.spectral is None:
            raise PreconditionError(f"The {path} path needs a diagonalizable order matrix")
        return self.spectral

    def terms(self, path: ApplyPath | str | None = None) -> tuple[OperatorTerm, ...]:
        """Weighted actions for the given path (default: spectral, or jordan if defective)."""
        chosen = self.default_path if path is None else ApplyPath(path)
        if chosen is ApplyPath.SPECTRAL:
            return self._spectral_terms
        if chosen is ApplyPath.SIMILARITY:
            return self._similarity_terms
        return self._jordan_terms

    def to_dict(self) -> dict[str, Any]:
        return {
            "base_point": self.base_point,
            "matrix": matrix_to_json(self.matrix),
            "realization_tag": str(self.realization),
        }


@instrument
def build_operator(matrix: Any, base_point: float = 0.0) -> MatrixOrderOperator:
    """
    Build D^A anchored at base_point.

    Normal A gets a unitary similarity (real orthogonal when A is real with
    real spectrum), other diagonalizable A a general similarity, and
    defective A the Jordan realization.

    Raises:
        MatrixShapeError: If A is not a finite square matrix
        AmbiguousJordanStructureError: If A is classified defective but no
            Jordan segment of size >= 2 is found
        Propagated decomposition errors
    """
    a = as_cmatrix(matrix)
    classification = classify(a)

    if classification.is_diagonalizable:
        spectral = spectral_projectors(a, classification)
        if spectral.is_real_orthogonal:
            realization = Realization.ORTHOGONAL
        elif classification.kind is MatrixClass.NORMAL:
            realization = Realization.UNITARY
        else:
            realization = Realization.SIMILARITY
        op = MatrixOrderOperator(float(base_point), a, classification, realization, spectral=spectral)
    else:
        jordan = jordan_decompose(a)
        if not jordan.has_nontrivial_segment:
            raise AmbiguousJordanStructureError(
                "Matrix was classified defective but every Jordan segment has size 1"
            )
        op = MatrixOrderOperator(
            float(base_point), a, classification, Realization.JORDAN, jordan=jordan
        )

    logger.debug(
        "build_operator: n=%d class=%s realization=%s cond=%.3e",
        op.n,
        classification.kind,
        op.realization,
        op.condition,
    )
    return op


def _check_base(op: MatrixOrderOperator, base_point: float) -> None:
    if base_point != op.base_point:
        raise PreconditionError(
            f"Operator is anchored at {op.base_point} but the function at {base_point}"
        )


def weighted_sum(base_point: float, parts: list[tuple[complex, Expression]]) -> Expression:
    terms = [
        PowerLogTerm(weight * t.coeff, t.exponent, t.log_power)
        for weight, expr in parts
        if weight != 0
        for t in expr.terms
    ]
    return Expression.of(base_point, terms)


def _actions(
    arguments: list[Expression], keys: list[tuple[complex, int]]
) -> list[dict[tuple[complex, int], Expression]]:
    """For every argument, each distinct scalar action applied to it."""

    def act_all(f: Expression) -> dict[tuple[complex, int], Expression]:
        return {key: scalar_action(f, *key) for key in keys}

    return parallel_map(act_all, arguments)


def _distinct_keys(terms: tuple[OperatorTerm, ...]) -> list[tuple[complex, int]]:
    return list(dict.fromkeys(t.action_key for t in terms))


@instrument
def apply_scalar(
    op: MatrixOrderOperator, f: Expression, path: ApplyPath | str | None = None
) -> MatrixExprFunction:
    """
    D^A f as an n×n MatrixExprFunction.

    Spectral path: Σ Gᵢ D^{λᵢ} f. Similarity path: P diag(D^{λ} f) P⁻¹.
    Jordan path: P blockdiag(Tᵢ) P⁻¹ with ∂ᵏ/∂λᵏ D^λ f / k! on the k-th
    superdiagonal of each segment.

    Raises:
        PreconditionError: If f has another base point or the path does not
            fit the operator
        JordanDepthError: If a segment needs more than three order-derivatives
        Propagated symbolic domain errors
    """
    _check_base(op, f.base_point)
    terms = op.terms(path)
    actions = _actions([f], _distinct_keys(terms))[0]
    rows = [
        [
            weighted_sum(f.base_point, [(t.weight[r, c], actions[t.action_key]) for t in terms])
            for c in range(op.n)
        ]
        for r in range(op.n)
    ]
    return MatrixExprFunction.from_rows(rows)


@instrument
def apply_vector(
    op: MatrixOrderOperator, v: VectorExprFunction, path: ApplyPath | str | None = None
) -> VectorExprFunction:
    """
    D^A acting on a vector: result_r = Σ_j Σ_terms W[r, j] · action(v_j).

    Raises:
        MatrixShapeError: If len(v) differs from the operator dimension
    """
    if v.n != op.n:
        raise MatrixShapeError(f"Vector of length {v.n} for an operator of dimension {op.n}")
    _check_base(op, v.base_point)
    terms = op.terms(path)
    actions = _actions(list(v.entries), _distinct_keys(terms))
    return VectorExprFunction.of(
        [
            weighted_sum(
                v.base_point,
                [(t.weight[r, j], actions[j][t.action_key]) for t in terms for j in range(op.n)],
            )
            for r in range(op.n)
        ]
    )


@instrument
def apply_matrix(
    op: MatrixOrderOperator, value: MatrixExprFunction, path: ApplyPath | str | None = None
) -> MatrixExprFunction:
    """
    D^A acting on a matrix of functions: (D^A F)[r, c] = Σ_j Σ_terms W[r, j] · action(F[j, c]).

    Raises:
        MatrixShapeError: If F's dimension differs from the operator's
    """
    if value.n != op.n:
        raise MatrixShapeError(f"Argument of dimension {value.n} for an operator of dimension {op.n}")
    _check_base(op, value.base_point)
    n = op.n
    terms = op.terms(path)
    flat = [value[j, c] for j in range(n) for c in range(n)]
    actions = _actions(flat, _distinct_keys(terms))
    rows = [
        [
            weighted_sum(
                value.base_point,
                [(t.weight[r, j], actions[j * n + c][t.action_key]) for t in terms for j in range(n)],
            )
            for c in range(n)
        ]
        for r in range(n)
    ]
    return MatrixExprFunction.from_rows(rows)
