"""
Numerical differintegration oracle.

Two unrelated methods that never share code with the closed forms:

- gl_differint: Grünwald-Letnikov sum
      h^(-λ) Σ_{j=0..N} (-1)^j C(λ, j) f(x - jh),   h = (x-a)/N
  with optional Richardson extrapolation over N, 2N, 4N. Handles both the
  integral and the derivative branch for complex λ. When f has no value
  at a (integrably singular there), the sum runs at order λ+1 over the
  running integral F(x) = ∫_a^x f instead, which vanishes at a.
- rl_quadrature: direct Riemann-Liouville integral
      (1/Γ(ν)) ∫_a^x f(ξ)(x-ξ)^(ν-1) dξ,   Re ν > 0
  by Gauss-Legendre on a mesh graded toward both endpoints, refined by
  doubling until two levels agree. Works for integrably singular f.

fd_lambda_derivative differentiates gl_differint in the order by central
differences.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fracmat._parallel import parallel_map
from fracmat.config import get_settings
from fracmat.errors import (
    DivergentBoundaryError,
    NonFiniteSampleError,
    OracleDomainError,
    QuadratureConvergenceError,
    SerializationError,
)
from fracmat.logging_config import get_logger
from fracmat.observability import instrument
from fracmat.special import recip_gamma
from fracmat.symbolic import Expression, boundary_limit

logger = get_logger(__name__)

Rule = Callable[[NDArray[np.float64]], ArrayLike]

FD_STEP_MIN = 1e-5
FD_STEP_MAX = 1e-3

# Halvings of the first cell toward a singular base point; offsets from a
# nonzero base point stay above 2^20 ulp of it.
_MAX_GRADING_DEPTH = 200
_OFFSET_FLOOR_ULPS = 2.0**20


@dataclass(frozen=True)
class SampledFunction:
    """
    A function known only through samples on [lower, upper].

    Attributes:
        rule: Vectorized map from real x to complex values
        lower: Left end of the domain (the base point a)
        upper: Right end of the domain
        name: Label used in logs and reports
        singular_at_lower: f has no finite value at lower and must only
            be sampled strictly inside the domain
    """

    rule: Rule
    lower: float
    upper: float
    name: str = "f"
    singular_at_lower: bool = False

    def __post_init__(self) -> None:
        if not self.upper > self.lower:
            raise OracleDomainError(
                f"Empty domain for {self.name}: [{self.lower}, {self.upper}]"
            )

    def __call__(self, x: NDArray[np.float64]) -> NDArray[np.complex128]:
        x = np.asarray(x, dtype=float)
        if np.any(x < self.lower) or np.any(x > self.upper):
            raise OracleDomainError(
                f"{self.name} sampled outside its domain [{self.lower}, {self.upper}]"
            )
        values = np.asarray(self.rule(x), dtype=complex)
        if not np.all(np.isfinite(values)):
            raise NonFiniteSampleError(f"{self.name} returned a non-finite sample")
        return values

    @classmethod
    def from_expression(cls, expr: Expression, upper: float, name: str | None = None) -> SampledFunction:
        """
        Sample an Expression, using its x -> a+ limit at the base point.

        When that limit does not exist the result is marked
        singular_at_lower and sampling exactly at a fails with
        NonFiniteSampleError.
        """
        a = expr.base_point
        singular = False
        try:
            at_base: complex = boundary_limit(expr)
        except DivergentBoundaryError:
            at_base = complex(np.nan, np.nan)
            singular = True

        def rule(x: NDArray[np.float64]) -> NDArray[np.complex128]:
            out = np.empty(x.shape, dtype=complex)
            inside = x > a
            out[~inside] = at_base
            if np.any(inside):
                out[inside] = expr.evaluate(x[inside])
            return out

        return cls(
            rule=rule,
            lower=a,
            upper=float(upper),
            name=name or str(expr),
            singular_at_lower=singular,
        )


@dataclass(frozen=True)
class OracleConfig:
    """Grünwald-Letnikov resolution.

    Attributes:
        steps: N, a power of two >= 16
        richardson_levels: 0, 1 or 2 extrapolation levels
    """

    steps: int = 16384
    richardson_levels: int = 1

    def __post_init__(self) -> None:
        if self.steps < 16 or self.steps & (self.steps - 1):
            raise OracleDomainError(f"steps must be a power of two >= 16, got {self.steps}")
        if self.richardson_levels not in (0, 1, 2):
            raise OracleDomainError(
                f"richardson_levels must be 0, 1 or 2, got {self.richardson_levels}"
            )

    @classmethod
    def from_settings(cls) -> OracleConfig:
        oracle = get_settings().oracle
        return cls(steps=oracle.steps, richardson_levels=oracle.richardson_levels)


def _check_interval(f: SampledFunction, a: float, x: float) -> None:
    if not x > a:
        raise OracleDomainError(f"Evaluation point {x} must exceed the base point {a}")
    if a < f.lower or x > f.upper:
        raise OracleDomainError(
            f"[{a}, {x}] is not inside the domain [{f.lower}, {f.upper}] of {f.name}"
        )


def _gl_weights(order: complex, n: int) -> NDArray[np.complex128]:
    """(-1)^j C(λ, j) for j = 0..n via w_j = w_{j-1}(1 - (λ+1)/j)."""
    factors = 1.0 - (order + 1.0) / np.arange(1, n + 1, dtype=float)
    return np.concatenate(([1.0 + 0j], np.cumprod(factors.astype(complex))))


def _gl_sum(f: SampledFunction, a: float, x: float, order: complex, n: int) -> complex:
    h = (x - a) / n
    if f.singular_at_lower:
        # D^λ f = D^(λ+1) F with F(x) = ∫_a^x f; F is listed from a upward
        samples = _running_integral(f, a, x, n)[::-1]
        order = order + 1.0
    else:
        points = x - h * np.arange(n + 1, dtype=float)
        points[-1] = a
        samples = f(points)
    total = complex(np.dot(_gl_weights(order, n), samples))
    return total * h ** (-order)


def _running_integral(f: SampledFunction, a: float, x: float, n: int) -> NDArray[np.complex128]:
    """∫_a^(a+kh) f for k = 0..n, h = (x-a)/n, without sampling f at a."""
    h = (x - a) / n
    points = get_settings().oracle.gauss_points
    nodes, weights = _gauss_legendre(points)

    starts = a + h * np.arange(1, n, dtype=float)
    xi = starts[:, None] + 0.5 * h * (1.0 + nodes)[None, :]
    cells = f(xi.ravel()).reshape(xi.shape) @ weights * (0.5 * h)

    running = np.empty(n + 1, dtype=complex)
    running[0] = 0.0
    running[1] = _first_cell_integral(f, a, h, points)
    running[2:] = running[1] + np.cumsum(cells)
    return running


def _first_cell_integral(f: SampledFunction, a: float, h: float, points: int) -> complex:
    """
    ∫_a^(a+h) f for f singular at a.

    Cells halve toward a; the piece left below the last edge is closed by
    the power law t^q fitted through the two innermost edges.
    """
    floor = _OFFSET_FLOOR_ULPS * np.finfo(float).eps * abs(a)
    depth = _MAX_GRADING_DEPTH
    if floor > 0.0:
        depth = max(1, min(depth, int(np.floor(np.log2(h / floor)))))
    edges = a + h * 2.0 ** -np.arange(depth + 1, dtype=float)

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.complex128]:
        return f(xi.ravel()).reshape(xi.shape)

    graded = _composite_gauss(integrand, edges, points)

    inner = edges[-1] - a
    f_inner, f_outer = f(np.array([edges[-1], edges[-2]]))
    if f_inner == 0 or f_outer == 0:
        return graded
    slope = np.log(f_outer / f_inner) / np.log((edges[-2] - a) / inner)
    return graded + complex(inner * f_inner / (slope + 1.0))


@instrument
def gl_differint(
    f: SampledFunction,
    a: float,
    x: float,
    order: complex | float,
    cfg: OracleConfig | None = None,
) -> complex:
    """
    Grünwald-Letnikov approximation of D^λ f at x.

    Args:
        f: Sampled function defined on [a, x]
        a: Base point
        x: Evaluation point, x > a
        order: λ (any complex value)
        cfg: Resolution; defaults to the configured oracle settings

    Raises:
        OracleDomainError: If x <= a or [a, x] leaves f's domain
        NonFiniteSampleError: If f or the result is not finite
    """
    cfg = cfg or OracleConfig.from_settings()
    _check_interval(f, a, x)
    order = complex(order)

    levels = [_gl_sum(f, a, x, order, cfg.steps * 2**i) for i in range(cfg.richardson_levels + 1)]
    if cfg.richardson_levels == 0:
        result = levels[0]
    else:
        first = [2.0 * levels[i + 1] - levels[i] for i in range(len(levels) - 1)]
        result = first[0] if cfg.richardson_levels == 1 else (4.0 * first[1] - first[0]) / 3.0

    if not np.isfinite(result):
        raise NonFiniteSampleError(f"Grünwald-Letnikov sum overflowed for order {order} at x={x}")
    return result


@lru_cache(maxsize=8)
def _gauss_legendre(points: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    nodes, weights = np.polynomial.legendre.leggauss(points)
    return nodes, weights


def _graded_edges(start: float, stop: float, cells: int, grading: float) -> NDArray[np.float64]:
    """Cell edges from start to stop, clustered toward start."""
    s = (np.arange(cells + 1, dtype=float) / cells) ** grading
    return start + (stop - start) * s


def _composite_gauss(integrand: Callable[[NDArray[np.float64]], NDArray[np.complex128]],
                     edges: NDArray[np.float64], points: int) -> complex:
    nodes, weights = _gauss_legendre(points)
    lo = np.minimum(edges[:-1], edges[1:])
    hi = np.maximum(edges[:-1], edges[1:])
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    xi = mid[:, None] + half[:, None] * nodes[None, :]
    return complex(np.sum(integrand(xi) * weights[None, :] * half[:, None]))


@instrument
def rl_quadrature(f: SampledFunction, a: float, x: float, order: complex | float) -> complex:
    """
    Riemann-Liouville integral of order ν: (1/Γ(ν)) ∫_a^x f(ξ)(x-ξ)^(ν-1) dξ.

    The interval is split at its midpoint and each half carries a mesh
    graded toward its outer endpoint, so both the kernel singularity at x
    and an integrable singularity of f at a are resolved. The cell count
    doubles until two successive results agree to oracle.quadrature_rtol.

    Args:
        f: Sampled function (only interior points are sampled)
        a: Base point
        x: Evaluation point, x > a
        order: ν with Re ν > 0

    Returns:
        Approximation of D^(-ν) f at x

    Raises:
        OracleDomainError: If Re ν <= 0 or x <= a
        QuadratureConvergenceError: If refinement stalls before max_cells
    """
    nu = complex(order)
    if nu.real <= 0:
        raise OracleDomainError(f"Integration order must have positive real part, got {nu}")
    _check_interval(f, a, x)

    settings = get_settings().oracle
    scale = recip_gamma(nu)
    mid = 0.5 * (a + x)

    def integrand(xi: NDArray[np.float64]) -> NDArray[np.complex128]:
        flat = xi.ravel()
        kernel = np.exp((nu - 1.0) * np.log(x - flat))
        return (f(flat) * kernel).reshape(xi.shape)

    def estimate(cells: int) -> complex:
        left = _graded_edges(a, mid, cells, settings.grading)
        right = _graded_edges(x, mid, cells, settings.grading)
        return scale * (
            _composite_gauss(integrand, left, settings.gauss_points)
            + _composite_gauss(integrand, right, settings.gauss_points)
        )

    cells = settings.initial_cells
    previous = estimate(cells)
    change = float("inf")
    while cells < settings.max_cells:
        cells *= 2
        current = estimate(cells)
        change = abs(current - previous)
        if change <= settings.quadrature_rtol * abs(current) or change == 0.0:
            logger.debug("rl_quadrature converged with %d cells per half", cells)
            return current
        previous = current

    raise QuadratureConvergenceError(
        f"Quadrature for order {nu} at x={x} did not settle within {settings.max_cells} cells "
        f"(last change {change:.3e})"
    )


@instrument
def fd_lambda_derivative(
    f: SampledFunction,
    a: float,
    x: float,
    order: complex | float,
    k: int,
    step: float | None = None,
    cfg: OracleConfig | None = None,
) -> complex:
    """
    Central finite difference of gl_differint in the order.

    Args:
        k: 1 or 2
        step: h_λ in [1e-5, 1e-3]; defaults to oracle.fd_step

    Raises:
        OracleDomainError: If k or step is out of range
    """
    if k not in (1, 2):
        raise OracleDomainError(f"Finite-difference order must be 1 or 2, got {k}")
    h = get_settings().oracle.fd_step if step is None else step
    if not FD_STEP_MIN <= h <= FD_STEP_MAX:
        raise OracleDomainError(f"Order step must lie in [{FD_STEP_MIN}, {FD_STEP_MAX}], got {h}")

    order = complex(order)
    plus = gl_differint(f, a, x, order + h, cfg)
    minus = gl_differint(f, a, x, order - h, cfg)
    if k == 1:
        return (plus - minus) / (2.0 * h)
    centre = gl_differint(f, a, x, order, cfg)
    return (plus - 2.0 * centre + minus) / (h * h)


def gl_on_grid(
    f: SampledFunction,
    a: float,
    xs: Sequence[float],
    order: complex | float,
    cfg: OracleConfig | None = None,
) -> list[complex]:
    """gl_differint at every grid point, evaluated on the worker pool."""
    cfg = cfg or OracleConfig.from_settings()
    return parallel_map(lambda x: gl_differint(f, a, x, order, cfg), list(xs))


# =============================================================================
# Named functions
# =============================================================================


def _power(params: dict[str, Any], base_point: float, log_power: int) -> Expression:
    exponent = params.get("exponent", 1.0)
    coeff = params.get("coeff", 1.0)
    for key, value in (("exponent", exponent), ("coeff", coeff)):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SerializationError(f"function.{key}: expected a real number")
    return Expression.power(exponent, coeff=coeff, log_power=log_power, base_point=base_point)


def _power_log(params: dict[str, Any], base_point: float) -> Expression:
    log_power = params.get("log_power", 1)
    if isinstance(log_power, bool) or not isinstance(log_power, int) or not 0 <= log_power <= 3:
        raise SerializationError("function.log_power: expected a whole number in 0..3")
    return _power(params, base_point, log_power)


NAMED_FUNCTIONS: dict[str, Callable[[dict[str, Any], float], Expression]] = {
    "power": lambda params, base_point: _power(params, base_point, 0),
    "power-log": _power_log,
}


def named_function(name: str, params: dict[str, Any], base_point: float) -> Expression:
    """
    Build a registered function: "power" is coeff·(x-a)^exponent and
    "power-log" adds a ln^log_power(x-a) factor.

    Raises:
        SerializationError: For an unknown name or bad parameters
    """
    try:
        builder = NAMED_FUNCTIONS[name]
    except KeyError:
        raise SerializationError(
            f"function.named: unknown function {name!r}; expected one of {sorted(NAMED_FUNCTIONS)}"
        ) from None
    return builder(params, base_point)
