"""Tests for the power-log engine: expressions, differintegration and compositions."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fracmat.errors import (
    BasePointMismatchError,
    DivergentBoundaryError,
    ExponentDomainError,
    LogPowerOverflowError,
    NonPolynomialError,
    PreconditionError,
    SerializationError,
)
from fracmat.special import gamma
from fracmat.symbolic import (
    Expression,
    PowerLogTerm,
    boundary_limit,
    composition_lhs,
    composition_rhs,
    differint_expr,
    differint_term,
    integer_derivative,
    lambda_derivative,
    leibniz_series,
    multiply,
)

POINTS = np.array([0.5, 0.9, 1.3, 2.0])


def assert_close_on_points(left: Expression, right: Expression, rel: float) -> None:
    lv = np.asarray(left.evaluate(POINTS))
    rv = np.asarray(right.evaluate(POINTS))
    scale = max(1.0, float(np.max(np.abs(rv))))
    assert float(np.max(np.abs(lv - rv))) <= rel * scale


class TestCanonicalForm:
    """Tests for Expression canonicalization."""

    def test_merges_equal_keys(self) -> None:
        expr = Expression.of(0.0, [PowerLogTerm(1.0, 2.0), PowerLogTerm(2.0, 2.0)])
        assert len(expr.terms) == 1
        assert expr.terms[0].coeff == 3.0

    def test_snaps_nearly_integral_exponents(self) -> None:
        expr = Expression.of(0.0, [PowerLogTerm(1.0, 1.0 + 1e-14), PowerLogTerm(1.0, 1.0)])
        assert len(expr.terms) == 1
        assert expr.terms[0].exponent == 1.0

    def test_keeps_distinct_log_powers(self) -> None:
        expr = Expression.of(0.0, [PowerLogTerm(1.0, 1.0, 0), PowerLogTerm(1.0, 1.0, 1)])
        assert [t.log_power for t in expr.terms] == [0, 1]

    def test_drops_cancelled_terms(self) -> None:
        expr = Expression.power(2.0) - Expression.power(2.0)
        assert expr.is_zero

    def test_sorted_by_exponent(self) -> None:
        expr = Expression.power(3.0) + Expression.power(0.5) + Expression.power(1.0)
        assert [t.exponent.real for t in expr.terms] == [0.5, 1.0, 3.0]

    def test_negative_log_power_rejected(self) -> None:
        with pytest.raises(ValueError):
            PowerLogTerm(1.0, 1.0, -1)


class TestExpressionAlgebra:
    """Tests for arithmetic, equivalence and evaluation."""

    def test_evaluate_scalar_and_array(self) -> None:
        f = Expression.power(2.0) - Expression.power(1.0)
        assert f.evaluate(2.0) == pytest.approx(2.0)
        np.testing.assert_allclose(f.evaluate(np.array([2.0, 3.0])), [2.0, 6.0])

    def test_evaluate_log_term(self) -> None:
        f = Expression.power(1.0, log_power=2)
        assert f.evaluate(math.e).real == pytest.approx(math.e)

    def test_evaluate_shifted_base_point(self) -> None:
        f = Expression.power(2.0, base_point=1.0)
        assert f.evaluate(3.0).real == pytest.approx(4.0)

    def test_evaluate_rejects_points_at_or_below_base(self) -> None:
        with pytest.raises(ValueError, match="defined only"):
            Expression.power(1.0).evaluate(np.array([0.5, 0.0]))

    def test_scale_and_multiplication(self) -> None:
        f = Expression.power(1.0)
        assert (2.0 * f).equivalent(f + f)
        assert (f * 3.0).terms[0].coeff == 3.0

    def test_equivalent_uses_relative_tolerance(self) -> None:
        f = Expression.power(1.0, coeff=1e6)
        g = Expression.power(1.0, coeff=1e6 + 1e-7)
        assert f.equivalent(g)
        assert not f.equivalent(Expression.power(1.0, coeff=1.1e6))

    def test_equivalent_false_across_base_points(self) -> None:
        assert not Expression.power(1.0).equivalent(Expression.power(1.0, base_point=1.0))

    def test_addition_across_base_points_raises(self) -> None:
        with pytest.raises(BasePointMismatchError):
            Expression.power(1.0) + Expression.power(1.0, base_point=1.0)

    def test_chop_drops_small_terms(self) -> None:
        f = Expression.power(1.0) + Expression.power(2.0, coeff=1e-20)
        assert len(f.chop(1e-15).terms) == 1

    def test_string_form(self) -> None:
        assert str(Expression.zero()) == "0"
        assert "ln^1" in str(Expression.power(0.5, log_power=1))


class TestExpressionJson:
    """Tests for the Expression JSON form."""

    def test_from_dict_accepts_bare_numbers(self) -> None:
        f = Expression.from_dict({"terms": [{"coeff": 2, "exponent": 0.5, "log_power": 1}]})
        assert f.terms == (PowerLogTerm(2.0, 0.5, 1),)
        assert f.base_point == 0.0

    def test_to_dict_shape(self) -> None:
        data = Expression.power(1.5, coeff=2.0, base_point=-0.0).to_dict()
        assert data == {
            "base_point": 0.0,
            "terms": [
                {
                    "coeff": {"re": 2.0, "im": 0.0},
                    "exponent": {"re": 1.5, "im": 0.0},
                    "log_power": 0,
                }
            ],
        }
        assert Expression.from_dict(data) == Expression.power(1.5, coeff=2.0)

    @pytest.mark.parametrize(
        ("data", "message"),
        [
            ([], "function: expected an object"),
            ({"terms": {}}, "function.terms: expected a list"),
            ({"terms": [{"coeff": 1.0}]}, "function.terms[0]: 'coeff' and 'exponent'"),
            ({"terms": [{"coeff": "x", "exponent": 1}]}, "function.terms[0].coeff"),
            ({"terms": [{"coeff": 1, "exponent": 1, "log_power": 4}]}, "log_power: must be in 0..3"),
            ({"terms": [], "extra": 1}, "unknown keys"),
        ],
    )
    def test_from_dict_reports_path(self, data: object, message: str) -> None:
        with pytest.raises(SerializationError, match=message.replace("[", r"\[").replace("]", r"\]")):
            Expression.from_dict(data)


class TestDifferint:
    """Tests for the closed-form power rule."""

    def test_half_derivative_of_x(self) -> None:
        result = differint_expr(Expression.power(1.0), 0.5)
        assert len(result.terms) == 1
        term = result.terms[0]
        assert term.exponent == 0.5
        assert term.coeff.real == pytest.approx(2.0 / math.sqrt(math.pi), rel=1e-13)

    def test_integer_derivative_is_exact(self) -> None:
        result = differint_expr(Expression.power(2.0), 1.0)
        assert result.terms == (PowerLogTerm(2.0, 1.0, 0),)

    def test_derivative_annihilates_polynomial(self) -> None:
        assert differint_expr(Expression.power(1.0), 2.0).is_zero

    def test_half_derivative_of_constant(self) -> None:
        result = differint_expr(Expression.constant(1.0), 0.5)
        assert result.terms[0].exponent == -0.5
        assert result.terms[0].coeff.real == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-13)

    def test_integral_of_constant(self) -> None:
        result = differint_expr(Expression.constant(1.0), -1.0)
        assert result.terms == (PowerLogTerm(1.0, 1.0, 0),)

    def test_zero_order_is_identity(self) -> None:
        f = Expression.power(0.3) + Expression.power(2.0, coeff=-1.5)
        assert differint_expr(f, 0.0).equivalent(f)

    def test_complex_order(self) -> None:
        result = differint_expr(Expression.power(1.0), 0.5 + 0.5j)
        expected = gamma(2.0) / gamma(1.5 - 0.5j)
        assert abs(result.terms[0].coeff - expected) < 1e-13
        assert result.terms[0].exponent == 0.5 - 0.5j

    def test_single_term_helper(self) -> None:
        result = differint_term(PowerLogTerm(1.0, 2.0), 1.0, base_point=1.0)
        assert result.base_point == 1.0
        assert result.terms == (PowerLogTerm(2.0, 1.0, 0),)

    def test_rejects_exponent_outside_domain(self) -> None:
        with pytest.raises(ExponentDomainError):
            differint_expr(Expression.power(-1.0), 0.5)

    def test_linearity(self) -> None:
        f = Expression.power(0.5)
        g = Expression.power(2.0, log_power=1)
        left = differint_expr(f.scale(2.0) + g.scale(-3.0), 0.7)
        right = differint_expr(f, 0.7).scale(2.0) + differint_expr(g, 0.7).scale(-3.0)
        assert left.equivalent(right)

    def test_integrals_form_a_semigroup(self) -> None:
        f = Expression.power(0.5) + Expression.power(2.0)
        left = differint_expr(differint_expr(f, -0.3), -0.4)
        assert left.equivalent(differint_expr(f, -0.7), rel_tol=1e-12)

    def test_derivative_of_x_log_x(self) -> None:
        result = differint_expr(Expression.power(1.0, log_power=1), 1.0)
        expected = Expression.power(0.0, log_power=1) + Expression.constant(1.0)
        assert result.equivalent(expected)

    def test_log_term_matches_exponent_difference(self) -> None:
        p, lam, h = 0.8, 0.35, 1e-5
        result = differint_expr(Expression.power(p, log_power=1), lam)
        estimate = (
            differint_expr(Expression.power(p + h), lam) - differint_expr(Expression.power(p - h), lam)
        ).scale(1.0 / (2 * h))
        assert_close_on_points(result, estimate, 1e-8)


class TestLambdaDerivative:
    """Tests for derivatives with respect to the order."""

    @pytest.mark.parametrize("lam", [0.3, -0.6, 1.5])
    def test_first_derivative_matches_central_difference(self, lam: float) -> None:
        f = Expression.power(1.0) + Expression.power(0.5)
        h = 1e-5
        closed = lambda_derivative(f, lam, 1)
        estimate = (differint_expr(f, lam + h) - differint_expr(f, lam - h)).scale(1 / (2 * h))
        assert_close_on_points(closed, estimate, 1e-8)

    def test_second_derivative_matches_central_difference(self) -> None:
        f = Expression.power(1.5)
        lam, h = 0.4, 1e-4
        closed = lambda_derivative(f, lam, 2)
        first_plus = lambda_derivative(f, lam + h, 1)
        first_minus = lambda_derivative(f, lam - h, 1)
        estimate = (first_plus - first_minus).scale(1 / (2 * h))
        assert_close_on_points(closed, estimate, 1e-6)

    def test_first_derivative_of_power_closed_form(self) -> None:
        from fracmat.special import polygamma

        p, lam, x = 1.0, 0.5, 1.7
        closed = lambda_derivative(Expression.power(p), lam, 1).evaluate(x)
        base = differint_expr(Expression.power(p), lam).evaluate(x)
        expected = base * (polygamma(0, p - lam + 1) - math.log(x))
        assert abs(closed - expected) < 1e-12

    def test_zero_index_is_differint(self) -> None:
        f = Expression.power(0.5)
        assert lambda_derivative(f, 0.3, 0).equivalent(differint_expr(f, 0.3))

    def test_pole_crossing_is_finite(self) -> None:
        # D^λ x at λ = 2 vanishes but its λ-derivative does not
        result = lambda_derivative(Expression.power(1.0), 2.0, 1)
        assert not result.is_zero
        assert np.all(np.isfinite(result.evaluate(POINTS)))

    def test_log_power_cap(self) -> None:
        with pytest.raises(LogPowerOverflowError):
            lambda_derivative(Expression.power(1.0, log_power=3), 0.5, 1)

    def test_negative_index_rejected(self) -> None:
        with pytest.raises(ValueError):
            lambda_derivative(Expression.power(1.0), 0.5, -1)


class TestCalculusHelpers:
    """Tests for ordinary derivatives and products."""

    def test_integer_derivative(self) -> None:
        result = integer_derivative(Expression.power(3.0), 2)
        assert result.terms == (PowerLogTerm(6.0, 1.0, 0),)

    def test_integer_derivative_of_log(self) -> None:
        result = integer_derivative(Expression.power(1.0, log_power=1), 1)
        expected = Expression.power(0.0, log_power=1) + Expression.constant(1.0)
        assert result.equivalent(expected)

    def test_integer_derivative_matches_differint(self) -> None:
        f = Expression.power(2.5) + Expression.power(1.2, log_power=1)
        assert integer_derivative(f, 1).equivalent(differint_expr(f, 1.0), rel_tol=1e-12)

    def test_multiply(self) -> None:
        product = multiply(Expression.power(0.5) + Expression.constant(1.0), Expression.power(1.0))
        expected = Expression.power(1.5) + Expression.power(1.0)
        assert product.equivalent(expected)

    def test_multiply_log_cap(self) -> None:
        f = Expression.power(1.0, log_power=2)
        with pytest.raises(LogPowerOverflowError):
            multiply(f, f)

    def test_multiply_base_mismatch(self) -> None:
        with pytest.raises(BasePointMismatchError):
            multiply(Expression.power(1.0), Expression.power(1.0, base_point=2.0))


class TestBoundaryLimit:
    """Tests for limits at the base point."""

    def test_constant_survives(self) -> None:
        assert boundary_limit(Expression.constant(3.0) + Expression.power(0.5)) == 3.0

    def test_vanishing_terms(self) -> None:
        assert boundary_limit(Expression.power(0.1, log_power=2)) == 0

    @pytest.mark.parametrize(
        "expr",
        [Expression.power(-0.5), Expression.power(0.0, log_power=1)],
    )
    def test_divergent(self, expr: Expression) -> None:
        with pytest.raises(DivergentBoundaryError):
            boundary_limit(expr)


class TestCompositions:
    """Tests for composition with boundary terms and the Leibniz series."""

    def test_boundary_terms_cancel_singular_part(self) -> None:
        f = Expression.power(0.7) + Expression.power(2.0)
        left = composition_lhs(0.4, 1.7, f)
        right = composition_rhs(0.4, 1.7, f)
        assert not left.is_zero
        assert_close_on_points(left, right, 1e-12)

    def test_integral_outer_order(self) -> None:
        f = Expression.power(0.5) + Expression.constant(2.0)
        left = composition_lhs(-0.3, 0.5, f)
        right = composition_rhs(-0.3, 0.5, f)
        assert_close_on_points(left, right, 1e-12)

    def test_inverse_witness(self) -> None:
        f = Expression.power(-0.5)
        assert composition_lhs(-0.5, 0.5, f).is_zero
        assert composition_rhs(-0.5, 0.5, f).max_abs_coeff() < 1e-14

    def test_rhs_requires_positive_inner_order(self) -> None:
        with pytest.raises(PreconditionError):
            composition_rhs(0.5, -0.5, Expression.power(1.0))

    def test_leibniz_matches_direct(self) -> None:
        f = Expression.power(0.5)
        g = Expression.power(2.0) + Expression.constant(1.0)
        series = leibniz_series(f, g, 0.5, 2)
        direct = differint_expr(multiply(f, g), 0.5)
        assert series.equivalent(direct, rel_tol=1e-12)

    def test_leibniz_extra_terms_change_nothing(self) -> None:
        f = Expression.power(1.5)
        g = Expression.power(1.0)
        assert leibniz_series(f, g, -0.4, 5).equivalent(leibniz_series(f, g, -0.4, 1))

    def test_leibniz_rejects_non_polynomial(self) -> None:
        with pytest.raises(NonPolynomialError):
            leibniz_series(Expression.power(1.0), Expression.power(0.5), 0.5, 2)

    def test_leibniz_rejects_negative_length(self) -> None:
        with pytest.raises(ValueError):
            leibniz_series(Expression.power(1.0), Expression.power(1.0), 0.5, -1)
