"""
Power-log basis.

An Expression is a finite sum of terms c·(x-a)^p·ln^m(x-a) anchored at a base
point a. The basis is closed under differintegration, differentiation in the
order, ordinary differentiation and multiplication, which is what lets
every identity be checked exactly.

Expressions are immutable and always canonical:
- exponents within key_tol of an integer (real part) or of the real axis
  (imaginary part) are snapped
- terms whose (p, m) keys agree within key_tol are merged
- terms with an exactly zero coefficient are dropped
- terms are sorted by (Re p, Im p, m)
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from fracmat.config import get_settings
from fracmat.errors import BasePointMismatchError, SerializationError
from fracmat.serialization import complex_from_json, complex_to_json, real_from_json

Scalar = complex | float


def _snap(value: float, tol: float) -> float:
    nearest = round(value)
    if abs(value - nearest) <= tol:
        return float(nearest)
    return value


def _snap_exponent(p: complex, tol: float) -> complex:
    return complex(_snap(p.real, tol), 0.0 if abs(p.imag) <= tol else p.imag)


@dataclass(frozen=True)
class PowerLogTerm:
    """coeff·(x-a)^exponent·ln^log_power(x-a); the base point lives on the Expression."""

    coeff: complex
    exponent: complex
    log_power: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeff", complex(self.coeff))
        object.__setattr__(self, "exponent", complex(self.exponent))
        if self.log_power < 0:
            raise ValueError(f"log_power must be non-negative, got {self.log_power}")

    @property
    def sort_key(self) -> tuple[float, float, int]:
        return (self.exponent.real, self.exponent.imag, self.log_power)

    def evaluate(self, t: NDArray[np.float64]) -> NDArray[np.complex128]:
        """Value at offsets t = x - a > 0."""
        log_t = np.log(t)
        values = self.coeff * np.exp(self.exponent * log_t)
        if self.log_power:
            values = values * log_t**self.log_power
        return values

    def to_dict(self) -> dict[str, Any]:
        return {
            "coeff": complex_to_json(self.coeff),
            "exponent": complex_to_json(self.exponent),
            "log_power": self.log_power,
        }


def _canonical_terms(terms: Iterable[PowerLogTerm], key_tol: float) -> tuple[PowerLogTerm, ...]:
    groups: list[list[Any]] = []
    snapped = sorted(
        (PowerLogTerm(t.coeff, _snap_exponent(t.exponent, key_tol), t.log_power) for t in terms),
        key=lambda t: t.sort_key,
    )
    for term in snapped:
        for group in groups:
            if group[1] == term.log_power and abs(group[0] - term.exponent) <= key_tol:
                group[2] += term.coeff
                break
        else:
            groups.append([term.exponent, term.log_power, term.coeff])

    merged = [PowerLogTerm(c, p, m) for p, m, c in groups if c != 0]
    return tuple(sorted(merged, key=lambda t: t.sort_key))


@dataclass(frozen=True)
class Expression:
    """
    A canonical sum of power-log terms anchored at base_point.

    Build instances with Expression.of() (or the helpers power, constant,
    zero); the raw constructor assumes its terms are already canonical.

    Example:
        >>> f = Expression.power(2.0) - Expression.power(1.0)   # x² - x at a = 0
        >>> f.evaluate(2.0)
        (2+0j)
    """

    base_point: float
    terms: tuple[PowerLogTerm, ...] = ()

    @classmethod
    def of(cls, base_point: float, terms: Iterable[PowerLogTerm]) -> Expression:
        """Canonicalize terms into an Expression."""
        key_tol = get_settings().symbolic.key_tol
        return cls(float(base_point), _canonical_terms(terms, key_tol))

    @classmethod
    def zero(cls, base_point: float = 0.0) -> Expression:
        return cls(float(base_point), ())

    @classmethod
    def constant(cls, value: Scalar, base_point: float = 0.0) -> Expression:
        return cls.of(base_point, [PowerLogTerm(value, 0.0, 0)])

    @classmethod
    def power(
        cls,
        exponent: Scalar,
        coeff: Scalar = 1.0,
        log_power: int = 0,
        base_point: float = 0.0,
    ) -> Expression:
        """coeff·(x-a)^exponent·ln^log_power(x-a)."""
        return cls.of(base_point, [PowerLogTerm(coeff, exponent, log_power)])

    # ------------------------------------------------------------------
    # Algebra
    # ------------------------------------------------------------------

    def _check_base(self, other: Expression) -> None:
        if self.base_point != other.base_point:
            raise BasePointMismatchError(
                f"Base points differ: {self.base_point} vs {other.base_point}"
            )

    def __add__(self, other: Expression) -> Expression:
        if not isinstance(other, Expression):
            return NotImplemented
        self._check_base(other)
        return Expression.of(self.base_point, self.terms + other.terms)

    def __sub__(self, other: Expression) -> Expression:
        if not isinstance(other, Expression):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> Expression:
        return self.scale(-1.0)

    def scale(self, factor: Scalar) -> Expression:
        """Multiply every coefficient by a constant."""
        factor = complex(factor)
        return Expression.of(
            self.base_point,
            (PowerLogTerm(t.coeff * factor, t.exponent, t.log_power) for t in self.terms),
        )

    def __mul__(self, factor: Scalar) -> Expression:
        if isinstance(factor, Expression):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_log_power(self) -> int:
        return max((t.log_power for t in self.terms), default=0)

    def max_abs_coeff(self) -> float:
        return max((abs(t.coeff) for t in self.terms), default=0.0)

    def equivalent(self, other: Expression, rel_tol: float | None = None) -> bool:
        """
        Canonical symbolic equality.

        True when both sides share a base point and every coefficient of the
        difference is within rel_tol of the largest coefficient of either side.
        """
        if self.base_point != other.base_point:
            return False
        if rel_tol is None:
            rel_tol = get_settings().tolerances.symbolic_rel
        scale = max(self.max_abs_coeff(), other.max_abs_coeff())
        difference = self - other
        return all(abs(t.coeff) <= rel_tol * scale for t in difference.terms)

    def chop(self, abs_tol: float) -> Expression:
        """Drop terms whose coefficient magnitude is at most abs_tol."""
        return Expression(self.base_point, tuple(t for t in self.terms if abs(t.coeff) > abs_tol))

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def evaluate(self, x: ArrayLike) -> Any:
        """
        Evaluate at x > base_point.

        Returns a complex scalar for scalar x, else a complex array of x's shape.

        Raises:
            ValueError: If any x does not exceed the base point
        """
        x_arr = np.asarray(x, dtype=float)
        t = x_arr - self.base_point
        if np.any(t <= 0):
            raise ValueError(f"Expressions are defined only for x > {self.base_point}")
        total = np.zeros(t.shape, dtype=complex)
        for term in self.terms:
            total = total + term.evaluate(t)
        if total.ndim == 0:
            return complex(total)
        return total

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "base_point": self.base_point + 0.0,
            "terms": [t.to_dict() for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: Any, path: str = "function") -> Expression:
        """
        Decode {base_point, terms:[{coeff, exponent, log_power}]}.

        Raises:
            SerializationError: With the dotted path of the offending field
        """
        if not isinstance(data, dict):
            raise SerializationError(f"{path}: expected an object")
        unknown = set(data) - {"base_point", "terms"}
        if unknown:
            raise SerializationError(f"{path}: unknown keys {sorted(unknown)}")
        base_point = real_from_json(data.get("base_point", 0.0), f"{path}.base_point")
        raw_terms = data.get("terms")
        if not isinstance(raw_terms, list):
            raise SerializationError(f"{path}.terms: expected a list")

        max_log_power = get_settings().symbolic.max_log_power
        terms = []
        for i, raw in enumerate(raw_terms):
            where = f"{path}.terms[{i}]"
            if not isinstance(raw, dict):
                raise SerializationError(f"{where}: expected an object")
            log_power = raw.get("log_power", 0)
            if isinstance(log_power, bool) or not isinstance(log_power, int):
                raise SerializationError(f"{where}.log_power: expected a whole number")
            if not 0 <= log_power <= max_log_power:
                raise SerializationError(
                    f"{where}.log_power: must be in 0..{max_log_power}, got {log_power}"
                )
            if "coeff" not in raw or "exponent" not in raw:
                raise SerializationError(f"{where}: 'coeff' and 'exponent' are required")
            terms.append(
                PowerLogTerm(
                    complex_from_json(raw["coeff"], f"{where}.coeff"),
                    complex_from_json(raw["exponent"], f"{where}.exponent"),
                    log_power,
                )
            )
        return cls.of(base_point, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        var = "x" if self.base_point == 0 else f"(x-{self.base_point:g})"
        parts = []
        for t in self.terms:
            piece = f"({t.coeff:.6g})"
            if t.exponent != 0:
                piece += f"*{var}^({t.exponent:.6g})"
            if t.log_power:
                piece += f"*ln^{t.log_power}{var}"
            parts.append(piece)
        return " + ".join(parts)
