"""Tests for the numerical oracle (Grünwald-Letnikov, quadrature, order differences)."""

from __future__ import annotations

import math

import numpy as np
import pytest

from fracmat.errors import NonFiniteSampleError, OracleDomainError, SerializationError
from fracmat.oracle import (
    OracleConfig,
    SampledFunction,
    fd_lambda_derivative,
    gl_differint,
    gl_on_grid,
    named_function,
    rl_quadrature,
)
from fracmat.symbolic import Expression, differint_expr, lambda_derivative


def sampled(expr: Expression, upper: float = 2.0) -> SampledFunction:
    return SampledFunction.from_expression(expr, upper=upper)


class TestOracleConfig:
    """Tests for OracleConfig validation."""

    def test_defaults_come_from_settings(self) -> None:
        cfg = OracleConfig.from_settings()
        assert cfg.steps == 16384
        assert cfg.richardson_levels == 1

    @pytest.mark.parametrize("steps", [8, 100, 1000])
    def test_rejects_bad_steps(self, steps: int) -> None:
        with pytest.raises(OracleDomainError, match="power of two"):
            OracleConfig(steps=steps)

    def test_rejects_bad_richardson(self) -> None:
        with pytest.raises(OracleDomainError):
            OracleConfig(richardson_levels=3)


class TestSampledFunction:
    """Tests for sampled functions."""

    def test_rejects_empty_domain(self) -> None:
        with pytest.raises(OracleDomainError):
            SampledFunction(rule=np.sin, lower=1.0, upper=1.0)

    def test_rejects_samples_outside_domain(self) -> None:
        f = SampledFunction(rule=np.sin, lower=0.0, upper=1.0)
        with pytest.raises(OracleDomainError):
            f(np.array([0.5, 1.5]))

    def test_rejects_non_finite_samples(self) -> None:
        f = SampledFunction(rule=lambda x: np.full(x.shape, np.nan), lower=0.0, upper=1.0)
        with pytest.raises(NonFiniteSampleError):
            f(np.array([0.5]))

    def test_expression_uses_boundary_limit(self) -> None:
        f = sampled(Expression.constant(2.0) + Expression.power(1.0))
        np.testing.assert_allclose(f(np.array([0.0, 1.0])), [2.0, 3.0])


class TestGrunwaldLetnikov:
    """Tests for the Grünwald-Letnikov approximation."""

    @pytest.mark.parametrize("order", [0.5, -0.5, 1.3, 0.5 + 0.3j])
    def test_matches_closed_form(self, order: complex) -> None:
        f = Expression.power(2.0) + Expression.power(1.0)
        x = 1.5
        exact = differint_expr(f, order).evaluate(x)
        approx = gl_differint(sampled(f), 0.0, x, order, OracleConfig(steps=4096))
        assert abs(approx - exact) <= 1e-4 * abs(exact)

    def test_richardson_improves_accuracy(self) -> None:
        f = Expression.power(2.0)
        exact = differint_expr(f, 0.5).evaluate(1.0)
        plain = gl_differint(sampled(f), 0.0, 1.0, 0.5, OracleConfig(steps=256, richardson_levels=0))
        extrapolated = gl_differint(
            sampled(f), 0.0, 1.0, 0.5, OracleConfig(steps=256, richardson_levels=2)
        )
        assert abs(extrapolated - exact) < abs(plain - exact)

    def test_shifted_base_point(self) -> None:
        f = Expression.power(1.0, base_point=1.0)
        approx = gl_differint(SampledFunction.from_expression(f, upper=3.0), 1.0, 2.0, 0.5)
        assert abs(approx - 2.0 / math.sqrt(math.pi)) < 1e-6

    def test_rejects_point_at_base(self) -> None:
        with pytest.raises(OracleDomainError, match="must exceed"):
            gl_differint(sampled(Expression.power(1.0)), 0.0, 0.0, 0.5)

    def test_rejects_interval_outside_domain(self) -> None:
        with pytest.raises(OracleDomainError):
            gl_differint(sampled(Expression.power(1.0), upper=1.0), 0.0, 1.5, 0.5)

    def test_halving_step_halves_error(self) -> None:
        """Plain sums converge at first order on smooth power terms."""
        f = Expression.power(2.0)
        exact = differint_expr(f, 0.5).evaluate(1.0)
        coarse, fine = (
            gl_differint(sampled(f), 0.0, 1.0, 0.5, OracleConfig(steps=n, richardson_levels=0))
            for n in (256, 512)
        )
        assert abs(coarse - exact) / abs(fine - exact) >= 1.8

    def test_grid_preserves_order(self) -> None:
        f = sampled(Expression.power(1.5))
        cfg = OracleConfig(steps=1024)
        xs = [0.5, 1.0, 1.5, 2.0]
        on_grid = gl_on_grid(f, 0.0, xs, 0.5, cfg)
        assert on_grid == [gl_differint(f, 0.0, x, 0.5, cfg) for x in xs]


class TestClosedFormAgreement:
    """Grünwald-Letnikov at default resolution against the closed forms."""

    @pytest.mark.parametrize("order", [0.5, -0.5, 0.3 + 0.2j])
    @pytest.mark.parametrize("exponent", [0.0, 1.0, 2.0, 0.5])
    def test_power_terms_on_grid(self, grid: list[float], order: complex, exponent: float) -> None:
        f = Expression.power(exponent)
        exact = differint_expr(f, order).evaluate(np.array(grid))
        approx = np.array(gl_on_grid(sampled(f), 0.0, grid, order))
        np.testing.assert_allclose(approx, exact, rtol=1e-4)


class TestSingularBasePoint:
    """Functions without a value at the base point."""

    def test_divergent_limit_marks_function(self) -> None:
        assert sampled(Expression.power(-0.5)).singular_at_lower
        assert sampled(Expression.power(0.0, log_power=1)).singular_at_lower
        assert not sampled(Expression.power(0.5, log_power=1)).singular_at_lower

    def test_base_value_is_never_sampled(self) -> None:
        f = sampled(Expression.power(-0.5))
        with pytest.raises(NonFiniteSampleError):
            f(np.array([0.0]))

    @pytest.mark.parametrize("order", [0.5, -0.5, 0.3 + 0.2j, -1.0])
    @pytest.mark.parametrize(
        ("exponent", "log_power"),
        [(-0.75, 0), (-0.5, 0), (-0.5, 1), (0.0, 1), (-0.3 + 0.4j, 0)],
    )
    def test_matches_closed_form(self, exponent: complex, log_power: int, order: complex) -> None:
        f = Expression.power(exponent, log_power=log_power)
        x = 1.3
        exact = differint_expr(f, order).evaluate(x)
        approx = gl_differint(sampled(f), 0.0, x, order)
        assert abs(approx - exact) <= 1e-3 * max(abs(exact), 1.0)

    def test_half_derivative_of_log(self) -> None:
        f = Expression.power(0.0, log_power=1)
        exact = differint_expr(f, 0.5).evaluate(1.0)
        assert abs(exact - 0.78213) < 1e-5
        assert abs(gl_differint(sampled(f), 0.0, 1.0, 0.5) - exact) <= 1e-3

    def test_inverse_square_root_half_derivative_vanishes(self) -> None:
        approx = gl_differint(sampled(Expression.power(-0.5)), 0.0, 1.0, 0.5)
        assert abs(approx) <= 1e-3

    def test_shifted_base_point(self) -> None:
        f = Expression.power(-0.5, base_point=1.0)
        approx = gl_differint(SampledFunction.from_expression(f, upper=3.0), 1.0, 2.0, -0.5)
        assert abs(approx - math.sqrt(math.pi)) <= 1e-3 * math.sqrt(math.pi)

    def test_order_derivative(self) -> None:
        f = Expression.power(-0.5)
        closed = lambda_derivative(f, -0.5, 1).evaluate(1.2)
        estimate = fd_lambda_derivative(sampled(f), 0.0, 1.2, -0.5, 1)
        assert abs(estimate - closed) < 1e-3


class TestQuadrature:
    """Tests for the direct Riemann-Liouville quadrature."""

    def test_smooth_integrand(self) -> None:
        f = Expression.power(2.0)
        exact = differint_expr(f, -1.5).evaluate(1.5)
        approx = rl_quadrature(sampled(f), 0.0, 1.5, 1.5)
        assert abs(approx - exact) <= 1e-6 * abs(exact)

    def test_integrably_singular_function(self) -> None:
        f = Expression.power(-0.5)
        approx = rl_quadrature(sampled(f), 0.0, 1.0, 0.5)
        assert abs(approx - math.sqrt(math.pi)) <= 1e-5

    @pytest.mark.parametrize("order", [-0.5, -1.0, -0.4 + 0.3j])
    @pytest.mark.parametrize("exponent", [1.0, 0.5, -0.5])
    def test_agrees_with_grunwald_letnikov(
        self, grid: list[float], order: complex, exponent: float
    ) -> None:
        f = sampled(Expression.power(exponent))
        quadrature = np.array([rl_quadrature(f, 0.0, x, -order) for x in grid])
        grunwald = np.array(gl_on_grid(f, 0.0, grid, order))
        np.testing.assert_allclose(grunwald, quadrature, rtol=1e-4)

    def test_rejects_non_positive_order(self) -> None:
        with pytest.raises(OracleDomainError, match="positive real part"):
            rl_quadrature(sampled(Expression.power(1.0)), 0.0, 1.0, -0.5)


class TestOrderDerivative:
    """Tests for finite differences in the order."""

    def test_first_derivative(self) -> None:
        f = Expression.power(1.0)
        closed = lambda_derivative(f, 0.5, 1).evaluate(1.2)
        estimate = fd_lambda_derivative(sampled(f), 0.0, 1.2, 0.5, 1)
        assert abs(estimate - closed) < 1e-4

    def test_second_derivative(self) -> None:
        f = Expression.power(1.0)
        closed = lambda_derivative(f, 0.5, 2).evaluate(1.2)
        estimate = fd_lambda_derivative(sampled(f), 0.0, 1.2, 0.5, 2, step=1e-3)
        assert abs(estimate - closed) < 1e-4

    def test_rejects_third_order(self) -> None:
        with pytest.raises(OracleDomainError):
            fd_lambda_derivative(sampled(Expression.power(1.0)), 0.0, 1.0, 0.5, 3)

    @pytest.mark.parametrize("step", [1e-6, 1e-2])
    def test_rejects_step_out_of_range(self, step: float) -> None:
        with pytest.raises(OracleDomainError, match="Order step"):
            fd_lambda_derivative(sampled(Expression.power(1.0)), 0.0, 1.0, 0.5, 1, step=step)


class TestNamedFunctions:
    """Tests for the named-function registry."""

    def test_power(self) -> None:
        f = named_function("power", {"exponent": 1.5, "coeff": 2.0}, 0.0)
        assert f == Expression.power(1.5, coeff=2.0)

    def test_power_defaults(self) -> None:
        assert named_function("power", {}, 1.0) == Expression.power(1.0, base_point=1.0)

    def test_power_log(self) -> None:
        f = named_function("power-log", {"exponent": 0.5, "log_power": 2}, 0.0)
        assert f == Expression.power(0.5, log_power=2)

    def test_unknown_name(self) -> None:
        with pytest.raises(SerializationError, match="unknown function"):
            named_function("sine", {}, 0.0)

    def test_bad_parameter(self) -> None:
        with pytest.raises(SerializationError, match="function.exponent"):
            named_function("power", {"exponent": "two"}, 0.0)
