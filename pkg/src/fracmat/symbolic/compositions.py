"""
Composition rules and the Leibniz series.

composition_lhs applies two differintegrals one after the other.
composition_rhs rebuilds the same result from the single differintegral of
order p+q minus the boundary terms at x = a:

    D^p D^q f = D^(p+q) f - Σ_{j=1..k} [D^(q-j) f]_{x=a+} (x-a)^(-p-j) / Γ(1-p-j)

with k the first whole number >= Re q. Boundary values are read off the
exponents symbolically; nothing is sampled near the singular endpoint.
"""

from __future__ import annotations

import math

from fracmat.config import get_settings
from fracmat.errors import DivergentBoundaryError, NonPolynomialError, PreconditionError
from fracmat.logging_config import get_logger
from fracmat.special import generalized_binomial, recip_gamma
from fracmat.symbolic.calculus import differint_expr, integer_derivative, multiply
from fracmat.symbolic.expression import Expression, PowerLogTerm, Scalar

logger = get_logger(__name__)


def boundary_limit(expr: Expression) -> complex:
    """
    Limit of expr as x -> a from above.

    Terms with Re(p) > 0 vanish, a plain constant term survives, and any
    other term with a nonzero coefficient has no finite limit.

    Raises:
        DivergentBoundaryError: If the limit does not exist
    """
    limit = 0j
    for term in expr.terms:
        p = term.exponent
        if p.real > 0:
            continue
        if p == 0 and term.log_power == 0:
            limit += term.coeff
            continue
        raise DivergentBoundaryError(
            f"Term with exponent {p} and log power {term.log_power} "
            f"has no finite limit at x = {expr.base_point}"
        )
    return limit


def composition_lhs(p: Scalar, q: Scalar, f: Expression) -> Expression:
    """D^p (D^q f): literal sequential application, inner order q first."""
    return differint_expr(differint_expr(f, q), p)


def composition_rhs(p: Scalar, q: Scalar, f: Expression) -> Expression:
    """
    D^(p+q) f minus the boundary terms of the composition rule.

    Args:
        p: Outer order (signed; a negative value gives the integral form)
        q: Inner order, Re(q) > 0
        f: Function

    Raises:
        PreconditionError: If Re(q) <= 0
        DivergentBoundaryError: If a boundary value D^(q-j) f at x = a diverges
    """
    p = complex(p)
    q = complex(q)
    if q.real <= 0:
        raise PreconditionError(f"Inner order must have positive real part, got {q}")

    k = math.ceil(q.real)
    result = differint_expr(f, p + q)
    boundary: list[PowerLogTerm] = []
    for j in range(1, k + 1):
        value = boundary_limit(differint_expr(f, q - j))
        if value == 0:
            continue
        boundary.append(PowerLogTerm(-value * recip_gamma(1.0 - p - j), -p - j, 0))
        logger.debug("Boundary term j=%d: value %s", j, value)
    return result + Expression.of(f.base_point, boundary)


def _polynomial_degree(g: Expression) -> int:
    tol = get_settings().symbolic.key_tol
    degree = 0
    for term in g.terms:
        p = term.exponent
        if term.log_power != 0 or p.imag != 0 or p.real < 0 or abs(p.real - round(p.real)) > tol:
            raise NonPolynomialError(
                f"Leibniz series terminates only for polynomial factors; got term with "
                f"exponent {p} and log power {term.log_power}"
            )
        degree = max(degree, round(p.real))
    return degree


def leibniz_series(f: Expression, g: Expression, q: Scalar, terms: int) -> Expression:
    """
    Partial sum Σ_{j=0..J} C(q,j) · D^(q-j) f · g⁽ʲ⁾ of the Leibniz rule.

    For polynomial g the series stops at j = deg g, so any J >= deg g gives
    D^q (f·g) exactly.

    Args:
        f: Any expression in the differintegration domain
        g: Polynomial in (x-a)
        q: Order
        terms: Highest index J (inclusive)

    Raises:
        NonPolynomialError: If g is not a polynomial
    """
    if terms < 0:
        raise ValueError(f"Series length must be non-negative, got {terms}")
    q = complex(q)
    degree = _polynomial_degree(g)
    total = Expression.zero(f.base_point)
    for j in range(min(terms, degree) + 1):
        derivative = integer_derivative(g, j)
        if derivative.is_zero:
            break
        piece = multiply(differint_expr(f, q - j), derivative)
        total = total + piece.scale(generalized_binomial(q, j))
    return total
