"""
Exact differintegration on the power-log basis c·(x-a)^p·ln^m(x-a).

Usage:
    from fracmat.symbolic import Expression, differint_expr

    f = Expression.power(1.0)              # x at a = 0
    half = differint_expr(f, 0.5)          # (2/√π)·x^(1/2)
"""

from __future__ import annotations

from fracmat.symbolic.calculus import (
    differint_expr,
    differint_term,
    integer_derivative,
    lambda_derivative,
    multiply,
)
from fracmat.symbolic.compositions import (
    boundary_limit,
    composition_lhs,
    composition_rhs,
    leibniz_series,
)
from fracmat.symbolic.expression import Expression, PowerLogTerm, Scalar

__all__ = [
    "Expression",
    "PowerLogTerm",
    "Scalar",
    "boundary_limit",
    "composition_lhs",
    "composition_rhs",
    "differint_expr",
    "differint_term",
    "integer_derivative",
    "lambda_derivative",
    "leibniz_series",
    "multiply",
]
