"""
Matrix-order differintegrals D^A and checks of their composition laws.

Usage:
    from fracmat.operators import apply_scalar, build_operator
    from fracmat.symbolic import Expression

    op = build_operator([[0.5, 0.0], [0.0, -0.5]])
    result = apply_scalar(op, Expression.power(1.0))
    result.evaluate(1.0)       # diag(1.12838, 0.75225)
"""

from __future__ import annotations

from fracmat.operators.functions import (
    MatrixExprFunction,
    VectorExprFunction,
    grid_residual,
    standard_grid,
)
from fracmat.operators.laws import (
    LawCheck,
    ShiftResult,
    additivity_check,
    compose_apply,
    compose_expansion,
    composition_check,
    determinant_check,
    determinant_sequential,
    inverse_pair_check,
    inverse_witness_check,
    jordan_superdiagonal_check,
    leibniz_check,
    noncommuting_checks,
    realization_check,
    shift_by_integer,
    shift_check,
    trace_law_check,
    transpose_check,
)
from fracmat.operators.operator import (
    ApplyPath,
    MatrixOrderOperator,
    OperatorTerm,
    Realization,
    apply_matrix,
    apply_scalar,
    apply_vector,
    build_operator,
)

__all__ = [
    "ApplyPath",
    "LawCheck",
    "MatrixExprFunction",
    "MatrixOrderOperator",
    "OperatorTerm",
    "Realization",
    "ShiftResult",
    "VectorExprFunction",
    "additivity_check",
    "apply_matrix",
    "apply_scalar",
    "apply_vector",
    "build_operator",
    "compose_apply",
    "compose_expansion",
    "composition_check",
    "determinant_check",
    "determinant_sequential",
    "grid_residual",
    "inverse_pair_check",
    "inverse_witness_check",
    "jordan_superdiagonal_check",
    "leibniz_check",
    "noncommuting_checks",
    "realization_check",
    "shift_by_integer",
    "shift_check",
    "standard_grid",
    "trace_law_check",
    "transpose_check",
]
