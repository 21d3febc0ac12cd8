"""
Composition laws of matrix-order differintegrals and their checks.

Each check returns a LawCheck carrying the measured residual, the tolerance
it was held to and the verdict. Symbolic checks measure the largest
coefficient of the difference relative to the largest coefficient of either
side; grid checks measure max |left - right| / max(1, max |right|) over the
sample points. Tolerances are multiplied by the condition numbers of the
similarities involved.

Checks raise PreconditionError when called outside the setting in which the
law holds, so a failed LawCheck always means the law itself was violated.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from math import factorial
from typing import Any, Literal

import numpy as np

from fracmat.config import Tolerances, get_settings
from fracmat.errors import PreconditionError
from fracmat.linalg import frobenius, is_real_symmetric
from fracmat.logging_config import get_logger
from fracmat.observability import instrument
from fracmat.operators.functions import MatrixExprFunction, grid_residual, standard_grid
from fracmat.operators.operator import (
    ApplyPath,
    MatrixOrderOperator,
    apply_matrix,
    apply_scalar,
    build_operator,
    weighted_sum,
)
from fracmat.oracle import SampledFunction, fd_lambda_derivative
from fracmat.symbolic import (
    Expression,
    composition_lhs,
    composition_rhs,
    differint_expr,
    integer_derivative,
    lambda_derivative,
    leibniz_series,
    multiply,
)

logger = get_logger(__name__)

# Largest finite-difference order the oracle supports
_FD_MAX_ORDER = 2
# Order step for second differences; the default step amplifies GL rounding
_FD_SECOND_STEP = 1e-3


@dataclass(frozen=True)
class LawCheck:
    """
    Outcome of one law check.

    Attributes:
        name: Check label used in reports
        residual: Measured residual
        tolerance: Bound the residual was compared against
        comparison: "<=" for agreement checks, ">" for gap checks that
            expect the law to fail
    """

    name: str
    residual: float
    tolerance: float
    comparison: Literal["<=", ">"] = "<="

    @property
    def passed(self) -> bool:
        if self.comparison == ">":
            return self.residual > self.tolerance
        return self.residual <= self.tolerance

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "comparison": self.comparison,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class ShiftResult:
    """Both sides of D^m D^A f = D^(A + mI) f."""

    derivative_path: MatrixExprFunction
    shifted_path: MatrixExprFunction
    residual: float
    tolerance: float

    @property
    def agree(self) -> bool:
        return self.residual <= self.tolerance


def _tolerances(tolerances: Tolerances | None) -> Tolerances:
    return tolerances if tolerances is not None else get_settings().tolerances


def _grid(op: MatrixOrderOperator, grid: Sequence[float] | None) -> list[float]:
    return list(grid) if grid is not None else standard_grid(op.base_point)


def _require_integral(op: MatrixOrderOperator, label: str) -> None:
    worst = max(lam.real for lam in op.eigenvalues)
    if worst > get_settings().symbolic.key_tol:
        raise PreconditionError(
            f"{label} needs Re(λ) <= 0 for every eigenvalue; found Re(λ) = {worst:.6g}"
        )


def _require_diagonalizable(op: MatrixOrderOperator, label: str) -> None:
    if op.spectral is None:
        raise PreconditionError(f"{label} needs a diagonalizable order matrix")


def _commute(a: MatrixOrderOperator, b: MatrixOrderOperator) -> bool:
    tol = get_settings().linalg.normal_tol
    scale = max(1.0, frobenius(a.matrix) * frobenius(b.matrix))
    return frobenius(a.matrix @ b.matrix - b.matrix @ a.matrix) <= tol * scale


def _grid_check(
    name: str,
    left: MatrixExprFunction,
    right: MatrixExprFunction,
    grid: list[float],
    tolerance: float,
) -> LawCheck:
    residual = grid_residual(left.on_grid(grid), right.on_grid(grid))
    check = LawCheck(name, residual, tolerance)
    logger.debug("%s: residual %.3e (tolerance %.3e)", name, residual, tolerance)
    return check


# =============================================================================
# Compositions
# =============================================================================


@instrument
def compose_apply(
    op_a: MatrixOrderOperator,
    op_b: MatrixOrderOperator,
    f: Expression,
    path_a: ApplyPath | str | None = None,
    path_b: ApplyPath | str | None = None,
) -> MatrixExprFunction:
    """D^A D^B f: op_b is applied to f first, then op_a acts on the matrix result."""
    if op_a.n != op_b.n:
        raise PreconditionError(f"Operators have dimensions {op_a.n} and {op_b.n}")
    return apply_matrix(op_a, apply_scalar(op_b, f, path_b), path_a)


@instrument
def compose_expansion(
    op_a: MatrixOrderOperator,
    op_b: MatrixOrderOperator,
    f: Expression,
    form: Literal["spectral", "similarity"] = "spectral",
    fused: bool = False,
) -> MatrixExprFunction:
    """
    D^A D^B f expanded over both spectra.

    spectral:   Σᵢ Σⱼ Gᵢ Hⱼ D^{λᵢ} D^{ρⱼ} f
    similarity: P [Rᵢⱼ D^{λᵢ} D^{ρⱼ} f] Q⁻¹ with R = P⁻¹Q

    With fused=True each D^{λᵢ} D^{ρⱼ} is replaced by D^{λᵢ+ρⱼ}, which is
    valid when both spectra are integral (Re <= 0).
    """
    _require_diagonalizable(op_a, "compose_expansion")
    _require_diagonalizable(op_b, "compose_expansion")
    if fused:
        _require_integral(op_a, "fused compose_expansion")
        _require_integral(op_b, "fused compose_expansion")
    assert op_a.spectral is not None and op_b.spectral is not None
    spec_a, spec_b = op_a.spectral, op_b.spectral

    pairs: list[tuple[np.ndarray, complex, complex]] = []
    if form == "spectral":
        for lam, g in zip(spec_a.eigenvalues, spec_a.projectors, strict=True):
            for rho, h in zip(spec_b.eigenvalues, spec_b.projectors, strict=True):
                pairs.append((g @ h, lam, rho))
    elif form == "similarity":
        p, q_inverse = spec_a.similarity, spec_b.similarity_inverse
        mixing = spec_a.similarity_inverse @ spec_b.similarity
        for i, lam in enumerate(spec_a.diagonal):
            for j, rho in enumerate(spec_b.diagonal):
                if mixing[i, j] != 0:
                    pairs.append((mixing[i, j] * np.outer(p[:, i], q_inverse[j, :]), lam, rho))
    else:
        raise ValueError(f"Unknown expansion form {form!r}")

    actions: dict[tuple[complex, complex], Expression] = {}
    for _, lam, rho in pairs:
        if (lam, rho) not in actions:
            actions[(lam, rho)] = (
                differint_expr(f, lam + rho) if fused else composition_lhs(lam, rho, f)
            )

    n = op_a.n
    rows = [
        [
            weighted_sum(f.base_point, [(w[r, c], actions[(lam, rho)]) for w, lam, rho in pairs])
            for c in range(n)
        ]
        for r in range(n)
    ]
    return MatrixExprFunction.from_rows(rows)


# =============================================================================
# Operator laws
# =============================================================================


@instrument
def realization_check(
    op: MatrixOrderOperator, f: Expression, tolerances: Tolerances | None = None
) -> LawCheck:
    """Spectral sum and similarity form of D^A f agree symbolically."""
    _require_diagonalizable(op, "realization_check")
    tol = _tolerances(tolerances).symbolic_rel * op.condition
    spectral = apply_scalar(op, f, ApplyPath.SPECTRAL)
    similarity = apply_scalar(op, f, ApplyPath.SIMILARITY)
    return LawCheck("realization", spectral.coefficient_residual(similarity), tol)


@instrument
def inverse_pair_check(
    op: MatrixOrderOperator,
    f: Expression,
    path: ApplyPath | str | None = None,
    grid: Sequence[float] | None = None,
    tolerances: Tolerances | None = None,
) -> LawCheck:
    """
    D^A D^-A f = f·I on the grid.

    Raises:
        PreconditionError: If some eigenvalue has Re(λ) < 0
    """
    worst = min(lam.real for lam in op.eigenvalues)
    if worst < -get_settings().symbolic.key_tol:
        raise PreconditionError(
            f"inverse_pair_check needs Re(λ) >= 0 for every eigenvalue; found {worst:.6g}"
        )
    negated = build_operator(-op.matrix, op.base_point)
    left = compose_apply(op, negated, f, path, path)
    right = MatrixExprFunction.identity(f, op.n)
    tol = _tolerances(tolerances).inverse_pair * op.condition * negated.condition
    label = f"inverse-pair[{ApplyPath(path) if path is not None else op.default_path}]"
    return _grid_check(label, left, right, _grid(op, grid), tol)


@instrument
def additivity_check(
    op_a: MatrixOrderOperator,
    op_b: MatrixOrderOperator,
    f: Expression,
    tolerances: Tolerances | None = None,
) -> LawCheck:
    """
    D^A D^B f = D^(A+B) f for commuting A, B with integral spectra.

    Raises:
        PreconditionError: If A and B do not commute or a spectrum has Re > 0
    """
    if not _commute(op_a, op_b):
        raise PreconditionError("additivity_check needs commuting order matrices")
    _require_integral(op_a, "additivity_check")
    _require_integral(op_b, "additivity_check")
    total = build_operator(op_a.matrix + op_b.matrix, op_a.base_point)
    left = compose_apply(op_a, op_b, f)
    right = apply_scalar(total, f)
    tol = _tolerances(tolerances).symbolic_rel * op_a.condition * op_b.condition * total.condition
    return LawCheck("additivity", left.coefficient_residual(right), tol)


@instrument
def shift_by_integer(
    op: MatrixOrderOperator,
    m: int,
    f: Expression,
    tolerances: Tolerances | None = None,
) -> ShiftResult:
    """
    dᵐ/dxᵐ D^A f and D^(A + mI) f.

    The two agree for every A: integer derivatives compose with any
    differintegral without boundary terms.
    """
    if m < 0:
        raise ValueError(f"Shift must be a whole number, got {m}")
    derivative_path = apply_scalar(op, f).map(lambda e: integer_derivative(e, m))
    shifted = build_operator(op.matrix + m * np.eye(op.n), op.base_point)
    shifted_path = apply_scalar(shifted, f)
    residual = derivative_path.coefficient_residual(shifted_path)
    tol = _tolerances(tolerances).symbolic_rel * op.condition * shifted.condition
    return ShiftResult(derivative_path, shifted_path, residual, tol)


@instrument
def shift_check(
    op: MatrixOrderOperator, m: int, f: Expression, tolerances: Tolerances | None = None
) -> LawCheck:
    result = shift_by_integer(op, m, f, tolerances)
    return LawCheck(f"shift[m={m}]", result.residual, result.tolerance)


@instrument
def transpose_check(
    op_a: MatrixOrderOperator,
    op_b: MatrixOrderOperator,
    f: Expression,
    grid: Sequence[float] | None = None,
    tolerances: Tolerances | None = None,
) -> LawCheck:
    """
    (D^A D^B f)ᵀ = D^B D^A f for real symmetric A, B.

    Raises:
        PreconditionError: If A or B is not real symmetric
    """
    tol_sym = get_settings().linalg.normal_tol
    for label, op in (("A", op_a), ("B", op_b)):
        if not is_real_symmetric(op.matrix, tol_sym):
            raise PreconditionError(f"transpose_check needs a real symmetric {label}")
    left = compose_apply(op_a, op_b, f).transpose()
    right = compose_apply(op_b, op_a, f)
    tol = _tolerances(tolerances).transpose * op_a.condition * op_b.condition
    return _grid_check("transpose", left, right, _grid(op_a, grid), tol)


@instrument
def determinant_sequential(
    op: MatrixOrderOperator, f: Expression, reverse: bool = False
) -> Expression:
    """
    Sequential differintegral Π D^{λᵢ} f over the eigenvalues with multiplicity.

    D^{λₙ} is applied first and D^{λ₁} last, in the decomposition's
    (Re, Im) order; reverse=True applies them the other way round.
    """
    _require_diagonalizable(op, "determinant_sequential")
    eigenvalues = op.eigenvalues if reverse else tuple(reversed(op.eigenvalues))
    result = f
    for lam in eigenvalues:
        result = differint_expr(result, lam)
    return result


@instrument
def determinant_check(
    op: MatrixOrderOperator, f: Expression, tolerances: Tolerances | None = None
) -> LawCheck:
    """The sequential product is independent of eigenvalue order for integral spectra."""
    _require_integral(op, "determinant_check")
    forward = determinant_sequential(op, f)
    backward = determinant_sequential(op, f, reverse=True)
    tol = _tolerances(tolerances).symbolic_rel
    return LawCheck("determinant-order", _expression_residual(forward, backward), tol)


@instrument
def trace_law_check(
    op: MatrixOrderOperator, f: Expression, tolerances: Tolerances | None = None
) -> LawCheck:
    """
    Sequential product equals D^{Tr A} f for integral spectra.

    Raises:
        PreconditionError: If some eigenvalue has Re(λ) > 0
    """
    _require_integral(op, "trace_law_check")
    left = determinant_sequential(op, f)
    right = differint_expr(f, complex(np.trace(op.matrix)))
    tol = _tolerances(tolerances).symbolic_rel
    return LawCheck("trace", _expression_residual(left, right), tol)


@instrument
def noncommuting_checks(
    op_a: MatrixOrderOperator,
    op_b: MatrixOrderOperator,
    f: Expression,
    grid: Sequence[float] | None = None,
    tolerances: Tolerances | None = None,
) -> list[LawCheck]:
    """
    For noncommuting A, B: both expansions reproduce D^A D^B f while
    D^(A+B) f differs from it by more than gaps.noncommuting.

    Raises:
        PreconditionError: If A and B commute
    """
    if _commute(op_a, op_b):
        raise PreconditionError("noncommuting_checks needs a noncommuting pair")
    tols = _tolerances(tolerances)
    points = _grid(op_a, grid)
    sequential = compose_apply(op_a, op_b, f)
    tol = tols.expansion * op_a.condition * op_b.condition
    checks = [
        _grid_check(
            f"expansion[{form}]", compose_expansion(op_a, op_b, f, form), sequential, points, tol
        )
        for form in ("spectral", "similarity")
    ]
    total = apply_scalar(build_operator(op_a.matrix + op_b.matrix, op_a.base_point), f)
    gap = grid_residual(total.on_grid(points), sequential.on_grid(points))
    checks.append(LawCheck("noncommuting-gap", gap, get_settings().gaps.noncommuting, ">"))
    return checks


@instrument
def jordan_superdiagonal_check(
    op: MatrixOrderOperator,
    f: Expression,
    grid: Sequence[float] | None = None,
    tolerances: Tolerances | None = None,
) -> LawCheck:
    """
    Superdiagonals of P⁻¹ (D^A f) P against finite differences in the order.

    For every segment and k = 1, 2 (as far as the segment reaches) the
    (start, start+k) entry must equal the k-th order-derivative of D^λ f
    divided by k!, estimated by the Grünwald-Letnikov oracle.

    Raises:
        PreconditionError: If the operator has no Jordan realization
    """
    if op.jordan is None:
        raise PreconditionError("jordan_superdiagonal_check needs a defective order matrix")
    points = _grid(op, grid)
    values = apply_scalar(op, f).on_grid(points)
    p, p_inverse = op.jordan.similarity, op.jordan.similarity_inverse
    blocks = np.einsum("ij,gjk,kl->gil", p_inverse, values, p)
    sampled = SampledFunction.from_expression(f, upper=max(points))

    worst = 0.0
    for seg in op.jordan.segments:
        for k in range(1, min(seg.size - 1, _FD_MAX_ORDER) + 1):
            step = None if k == 1 else _FD_SECOND_STEP
            closed = lambda_derivative(f, seg.eigenvalue, k)
            for g, x in enumerate(points):
                expected = fd_lambda_derivative(sampled, op.base_point, x, seg.eigenvalue, k, step)
                entry = blocks[g, seg.start, seg.start + k] * factorial(k)
                worst = max(worst, abs(entry - expected), abs(complex(closed.evaluate(x)) - expected))
    tol = _tolerances(tolerances).jordan_fd_abs * op.condition
    logger.debug("jordan superdiagonal: worst deviation %.3e", worst)
    return LawCheck("jordan-superdiagonal", worst, tol)


# =============================================================================
# Scalar identities
# =============================================================================


def _expression_residual(left: Expression, right: Expression) -> float:
    scale = max(left.max_abs_coeff(), right.max_abs_coeff())
    worst = (left - right).max_abs_coeff()
    if worst == 0.0:
        return 0.0
    return worst / scale if scale > 0 else worst


def _expression_grid_residual(left: Expression, right: Expression, grid: list[float]) -> float:
    lv = np.asarray(left.evaluate(np.asarray(grid)), dtype=complex)
    rv = np.asarray(right.evaluate(np.asarray(grid)), dtype=complex)
    return grid_residual(lv, rv)


@instrument
def composition_check(
    p: complex | float,
    q: complex | float,
    f: Expression,
    grid: Sequence[float] | None = None,
    tolerances: Tolerances | None = None,
) -> LawCheck:
    """Sequential D^p D^q f against the closed form with boundary terms."""
    points = list(grid) if grid is not None else standard_grid(f.base_point)
    left = composition_lhs(p, q, f)
    right = composition_rhs(p, q, f)
    residual = _expression_grid_residual(left, right, points)
    return LawCheck(f"composition[p={p},q={q}]", residual, _tolerances(tolerances).composition)


@instrument
def inverse_witness_check(
    q: complex | float,
    f: Expression,
    grid: Sequence[float] | None = None,
) -> LawCheck:
    """
    D^-q D^q f differs from f by more than gaps.witness.

    With f = (x-a)^(-1/2) and q = 1/2 the inner derivative vanishes, so the
    left inverse law fails.
    """
    points = list(grid) if grid is not None else standard_grid(f.base_point)
    left = composition_lhs(-complex(q), q, f)
    residual = _expression_grid_residual(left, f, points)
    return LawCheck(f"inverse-witness[q={q}]", residual, get_settings().gaps.witness, ">")


@instrument
def leibniz_check(
    f: Expression,
    g: Expression,
    q: complex | float,
    terms: int,
    tolerances: Tolerances | None = None,
) -> LawCheck:
    """Terminating Leibniz series against the direct differintegral of f·g."""
    series = leibniz_series(f, g, q, terms)
    direct = differint_expr(multiply(f, g), q)
    tol = _tolerances(tolerances).symbolic_rel
    return LawCheck(f"leibniz[q={q}]", _expression_residual(series, direct), tol)
