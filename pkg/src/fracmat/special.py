"""
Complex gamma-family functions.

Everything the closed-form differintegrals need: log-gamma, gamma, the
entire reciprocal gamma, polygamma up to order 3, generalized binomials and
the gamma ratio Γ(a)/Γ(b) that every power-rule coefficient goes through.

Gamma uses the g=7, n=9 Lanczos approximation for Re(z) >= 0.5 and the
reflection formula elsewhere. Polygamma shifts the argument upward with
ψ⁽ⁿ⁾(z) = ψ⁽ⁿ⁾(z+1) - (-1)ⁿ n!/zⁿ⁺¹ until Re(z) >= 10 and then sums the
asymptotic series.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import cmath
import math
from math import comb, factorial

from fracmat.errors import PoleError

POLE_TOL = 1e-12
MAX_POLYGAMMA_ORDER = 3

# Integer gaps up to this size are evaluated as exact Pochhammer products
_MAX_PRODUCT_GAP = 64

_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)

# B_2, B_4, ..., B_16
_BERNOULLI_EVEN = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

_ASYMPTOTIC_THRESHOLD = 10.0


def _as_complex(z: complex | float) -> complex:
    value = complex(z)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise ValueError(f"Argument must be finite, got {value!r}")
    return value


def pole_index(z: complex | float, tol: float = POLE_TOL) -> int | None:
    """Return n when z lies within tol of the non-positive integer n, else None."""
    z = complex(z)
    if abs(z.imag) > tol:
        return None
    n = round(z.real)
    if n <= 0 and abs(z.real - n) <= tol:
        return int(n)
    return None


def is_pole(z: complex | float, tol: float = POLE_TOL) -> bool:
    """True when z is (numerically) a pole of Γ."""
    return pole_index(z, tol) is not None


def _ln_gamma_lanczos(z: complex) -> complex:
    z -= 1.0
    series = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * cmath.log(t) - t + cmath.log(series)


def ln_gamma(z: complex | float, pole_tol: float = POLE_TOL) -> complex:
    """
    Logarithm of the gamma function.

    Args:
        z: Complex argument
        pole_tol: Distance to a non-positive integer treated as a pole

    Returns:
        log Γ(z); real for real z > 0, and exp(ln_gamma(z)) == Γ(z) everywhere

    Raises:
        PoleError: If z is a non-positive integer
    """
    z = _as_complex(z)
    if is_pole(z, pole_tol):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return _LOG_PI - cmath.log(cmath.sin(math.pi * z)) - _ln_gamma_lanczos(1.0 - z)
    return _ln_gamma_lanczos(z)


def gamma(z: complex | float, pole_tol: float = POLE_TOL) -> complex:
    """Γ(z) for complex z.

    Raises:
        PoleError: If z is a non-positive integer
    """
    z = _as_complex(z)
    if is_pole(z, pole_tol):
        raise PoleError(f"Gamma has a pole at {z}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * gamma(1.0 - z, pole_tol))
    return cmath.exp(_ln_gamma_lanczos(z))


def recip_gamma(z: complex | float, pole_tol: float = POLE_TOL) -> complex:
    """1/Γ(z), an entire function; exactly 0 at the poles of Γ."""
    z = _as_complex(z)
    if is_pole(z, pole_tol):
        return 0j
    return cmath.exp(-ln_gamma(z, pole_tol))


def polygamma(order: int, z: complex | float, pole_tol: float = POLE_TOL) -> complex:
    """
    Polygamma function ψ⁽ᵒʳᵈᵉʳ⁾(z); order 0 is the digamma function.

    Args:
        order: 0, 1, 2 or 3
        z: Complex argument

    Raises:
        ValueError: If order is outside 0..3
        PoleError: If z is a non-positive integer
    """
    if order not in range(MAX_POLYGAMMA_ORDER + 1):
        raise ValueError(f"polygamma order must be in 0..{MAX_POLYGAMMA_ORDER}, got {order}")
    z = _as_complex(z)
    if is_pole(z, pole_tol):
        raise PoleError(f"Polygamma has a pole at {z}")

    sign = -1.0 if order % 2 else 1.0
    n_fact = factorial(order)

    shift = 0j
    while z.real < _ASYMPTOTIC_THRESHOLD:
        shift -= sign * n_fact / z ** (order + 1)
        z += 1.0

    if order == 0:
        value = cmath.log(z) - 0.5 / z
        z2 = z * z
        power = z2
        for k, b in enumerate(_BERNOULLI_EVEN, start=1):
            value -= b / (2 * k * power)
            power *= z2
        return value + shift

    value = factorial(order - 1) / z**order + n_fact / (2.0 * z ** (order + 1))
    for k, b in enumerate(_BERNOULLI_EVEN, start=1):
        value += b * factorial(2 * k + order - 1) / (factorial(2 * k) * z ** (2 * k + order))
    return -sign * value + shift


def generalized_binomial(q: complex | float, j: int) -> complex:
    """
    Generalized binomial coefficient C(q, j) = Γ(q+1) / (Γ(j+1) Γ(q-j+1)).

    Evaluated as the falling product q(q-1)...(q-j+1)/j!, which is the same
    entire function of q and vanishes automatically when q is an integer
    smaller than j.
    """
    if j < 0:
        raise ValueError(f"j must be a whole number, got {j}")
    q = _as_complex(q)
    value = 1.0 + 0j
    for i in range(j):
        value = value * (q - i) / (i + 1)
    return value


def _integer_gap(d: complex, tol: float) -> int | None:
    if abs(d.imag) > tol:
        return None
    n = round(d.real)
    if abs(d.real - n) <= tol and abs(n) <= _MAX_PRODUCT_GAP:
        return int(n)
    return None


def gamma_ratio(a: complex | float, b: complex | float, pole_tol: float = POLE_TOL) -> complex:
    """
    Γ(a)/Γ(b), with 1/Γ(b) taken as 0 at poles of Γ(b).

    When a - b is a (small) integer the ratio is a Pochhammer product, which
    makes integer-order cases exact: Γ(p+1)/Γ(p+1) == 1.0,
    Γ(3)/Γ(2) == 2.0, Γ(1)/Γ(0) == 0.0.

    Raises:
        PoleError: If a is a pole of Γ
    """
    a = _as_complex(a)
    b = _as_complex(b)
    if is_pole(a, pole_tol):
        raise PoleError(f"Gamma has a pole at {a}")

    n = _integer_gap(a - b, pole_tol)
    if n is not None:
        value = 1.0 + 0j
        if n >= 0:
            for k in range(1, n + 1):
                value *= a - k
            return value
        for k in range(-n):
            value *= a + k
        return 1.0 / value

    if is_pole(b, pole_tol):
        return 0j
    return cmath.exp(ln_gamma(a, pole_tol) - ln_gamma(b, pole_tol))


def _bell_polynomials(psi: tuple[complex, ...], order: int) -> list[complex]:
    """Complete Bell polynomials in (ψ, ψ', ψ'') up to the given order.

    Γ⁽ᵏ⁾ = Γ·Bₖ(ψ, ψ', ψ'').
    """
    p0 = psi[0] if order >= 1 else 0j
    p1 = psi[1] if order >= 2 else 0j
    p2 = psi[2] if order >= 3 else 0j
    bells = [1.0 + 0j, p0, p0 * p0 + p1, p0**3 + 3 * p0 * p1 + p2]
    return bells[: order + 1]


def gamma_derivatives(z: complex | float, order: int, pole_tol: float = POLE_TOL) -> list[complex]:
    """[Γ(z), Γ'(z), ..., Γ⁽ᵒʳᵈᵉʳ⁾(z)] for order <= 3.

    Raises:
        PoleError: If z is a pole of Γ
    """
    if order not in range(MAX_POLYGAMMA_ORDER + 1):
        raise ValueError(f"derivative order must be in 0..{MAX_POLYGAMMA_ORDER}, got {order}")
    g = gamma(z, pole_tol)
    psi = tuple(polygamma(k, z, pole_tol) for k in range(order))
    return [g * b for b in _bell_polynomials(psi, order)]


def recip_gamma_derivatives(
    z: complex | float, order: int, pole_tol: float = POLE_TOL
) -> list[complex]:
    """
    [1/Γ, (1/Γ)', ..., (1/Γ)⁽ᵒʳᵈᵉʳ⁾] at z for order <= 3.

    At a pole z = -n the values come from 1/Γ(z) = Γ(1-z) sin(πz)/π, whose
    sine factor has known derivatives there; elsewhere from
    (1/Γ)' = -(1/Γ)ψ and its successors.
    """
    if order not in range(MAX_POLYGAMMA_ORDER + 1):
        raise ValueError(f"derivative order must be in 0..{MAX_POLYGAMMA_ORDER}, got {order}")
    z = _as_complex(z)
    n = pole_index(z, pole_tol)

    if n is not None:
        # h(z) = Γ(1-z)/π, so h⁽ʲ⁾(z) = (-1)ʲ Γ⁽ʲ⁾(1-z)/π
        gam = gamma_derivatives(1 - n, order, pole_tol)
        h = [(-1) ** j * gam[j] / math.pi for j in range(order + 1)]
        parity = -1.0 if n % 2 else 1.0
        sine = [0.0, parity * math.pi, 0.0, -parity * math.pi**3]
        return [
            sum(comb(k, i) * h[k - i] * sine[i] for i in range(k + 1)) + 0j
            for k in range(order + 1)
        ]

    rg = recip_gamma(z, pole_tol)
    psi = [polygamma(k, z, pole_tol) for k in range(order)]
    p0 = psi[0] if order >= 1 else 0j
    p1 = psi[1] if order >= 2 else 0j
    p2 = psi[2] if order >= 3 else 0j
    factors = [1.0 + 0j, -p0, p0 * p0 - p1, -(p0**3) + 3 * p0 * p1 - p2]
    return [rg * f for f in factors[: order + 1]]
