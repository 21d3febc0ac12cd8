"""
Closed-form Riemann-Liouville differintegration on the power-log basis.

The kernel is the Euler power rule

    D^λ (x-a)^p = Γ(p+1)/Γ(p-λ+1) · (x-a)^(p-λ),        Re p > -1

with the reciprocal gamma written out so that pole cancellations give exact
zeros. Log powers and derivatives in the order both come from
differentiating that closed form: ln^m(x-a)·(x-a)^p = ∂ᵐ/∂pᵐ (x-a)^p, so

    ∂ᵏ/∂λᵏ D^λ [(x-a)^p ln^m(x-a)]
        = (-1)ᵏ Σⱼ C(m,j) Γ⁽ʲ⁾(p+1) Φ⁽ᵐ⁻ʲ⁺ᵏ⁾(u),     u = p-λ+1,
    Φ⁽ʳ⁾(u) = Σᵢ C(r,i) (1/Γ)⁽ⁱ⁾(u) (x-a)^(u-1) ln^(r-i)(x-a).

The total derivative order m+k is capped by symbolic.max_log_power.
"""

from __future__ import annotations

from math import comb

from fracmat.config import get_settings
from fracmat.errors import BasePointMismatchError, ExponentDomainError, LogPowerOverflowError
from fracmat.logging_config import get_logger
from fracmat.special import gamma_derivatives, gamma_ratio, recip_gamma_derivatives
from fracmat.symbolic.expression import Expression, PowerLogTerm, Scalar

logger = get_logger(__name__)


def _check_domain(term: PowerLogTerm) -> None:
    if term.exponent.real <= -1.0:
        raise ExponentDomainError(
            f"Exponent {term.exponent} is outside the differintegration domain Re(p) > -1"
        )


def _differint_terms(term: PowerLogTerm, order: complex, k: int) -> list[PowerLogTerm]:
    """Power-log terms of ∂ᵏ/∂λᵏ D^λ applied to one term."""
    _check_domain(term)
    symbolic = get_settings().symbolic
    m = term.log_power
    if m + k > symbolic.max_log_power:
        raise LogPowerOverflowError(
            f"ln^{m} term with order-derivative {k} needs log power {m + k} "
            f"(cap {symbolic.max_log_power})"
        )

    p = term.exponent
    u = p - order + 1.0
    exponent = p - order

    if m == 0 and k == 0:
        coeff = term.coeff * gamma_ratio(p + 1.0, u, symbolic.pole_tol)
        return [PowerLogTerm(coeff, exponent, 0)]

    gam = gamma_derivatives(p + 1.0, m, symbolic.pole_tol)
    rgam = recip_gamma_derivatives(u, m + k, symbolic.pole_tol)
    sign = -1.0 if k % 2 else 1.0

    out: list[PowerLogTerm] = []
    for j in range(m + 1):
        outer = term.coeff * sign * comb(m, j) * gam[j]
        r = m - j + k
        for i in range(r + 1):
            coeff = outer * comb(r, i) * rgam[i]
            if coeff != 0:
                out.append(PowerLogTerm(coeff, exponent, r - i))
    return out


def differint_term(term: PowerLogTerm, order: Scalar, base_point: float = 0.0) -> Expression:
    """
    Differintegral of order λ of a single power-log term.

    Negative real part integrates, non-negative differentiates.

    Args:
        term: The term c·(x-a)^p·ln^m(x-a)
        order: λ
        base_point: a

    Returns:
        Canonical Expression of the exact result

    Raises:
        ExponentDomainError: If Re(p) <= -1
        LogPowerOverflowError: If m exceeds the log-power cap
    """
    return Expression.of(base_point, _differint_terms(term, complex(order), 0))


def differint_expr(expr: Expression, order: Scalar) -> Expression:
    """Termwise differintegral of order λ; exactly linear."""
    order = complex(order)
    terms: list[PowerLogTerm] = []
    for term in expr.terms:
        terms.extend(_differint_terms(term, order, 0))
    return Expression.of(expr.base_point, terms)


def lambda_derivative(expr: Expression, order: Scalar, k: int) -> Expression:
    """
    k-th derivative in the order: ∂ᵏ/∂λᵏ D^λ expr, for k <= 3.

    For a pure power this is D^λ f times (ψ(p-λ+1) - ln(x-a)) at k = 1,
    expanded in the power-log basis.

    Raises:
        ValueError: If k is negative
        LogPowerOverflowError: If log power plus k exceeds the cap
    """
    if k < 0:
        raise ValueError(f"Order-derivative index must be non-negative, got {k}")
    order = complex(order)
    terms: list[PowerLogTerm] = []
    for term in expr.terms:
        terms.extend(_differint_terms(term, order, k))
    return Expression.of(expr.base_point, terms)


def _derivative_once(expr: Expression) -> Expression:
    terms: list[PowerLogTerm] = []
    for t in expr.terms:
        new_exponent = t.exponent - 1.0
        if t.exponent != 0:
            terms.append(PowerLogTerm(t.coeff * t.exponent, new_exponent, t.log_power))
        if t.log_power:
            terms.append(PowerLogTerm(t.coeff * t.log_power, new_exponent, t.log_power - 1))
    return Expression.of(expr.base_point, terms)


def integer_derivative(expr: Expression, m: int) -> Expression:
    """Ordinary m-fold derivative d^m/dx^m via the product rule."""
    if m < 0:
        raise ValueError(f"Derivative count must be non-negative, got {m}")
    result = expr
    for _ in range(m):
        result = _derivative_once(result)
    return result


def multiply(left: Expression, right: Expression) -> Expression:
    """
    Pointwise product of two expressions.

    Raises:
        BasePointMismatchError: If the base points differ
        LogPowerOverflowError: If a product term exceeds the log-power cap
    """
    if left.base_point != right.base_point:
        raise BasePointMismatchError(
            f"Cannot multiply expressions at base points {left.base_point} and {right.base_point}"
        )
    cap = get_settings().symbolic.max_log_power
    terms: list[PowerLogTerm] = []
    for s in left.terms:
        for t in right.terms:
            log_power = s.log_power + t.log_power
            if log_power > cap:
                raise LogPowerOverflowError(
                    f"Product has log power {log_power} (cap {cap})"
                )
            terms.append(PowerLogTerm(s.coeff * t.coeff, s.exponent + t.exponent, log_power))
    return Expression.of(left.base_point, terms)
