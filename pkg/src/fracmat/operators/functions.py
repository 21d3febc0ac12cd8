"""
Matrix- and vector-valued functions whose entries are Expressions.

These are the values produced by applying a matrix-order operator. All
entries share one base point. Equality is decided symbolically with a
tolerance relative to the largest coefficient of the whole array, or
pointwise on a grid.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from fracmat.config import get_settings
from fracmat.errors import BasePointMismatchError, MatrixShapeError, SerializationError
from fracmat.symbolic import Expression, Scalar


def standard_grid(base_point: float) -> list[float]:
    """base_point + {grid_start, ..., grid_stop} with runtime.grid_points points."""
    runtime = get_settings().runtime
    offsets = np.linspace(runtime.grid_start, runtime.grid_stop, runtime.grid_points)
    return [base_point + float(o) for o in offsets]


def grid_residual(left: NDArray[np.complex128], right: NDArray[np.complex128]) -> float:
    """max |left - right| relative to max(1, max |right|)."""
    if left.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(right))))
    return float(np.max(np.abs(left - right))) / scale


def _coefficient_residual(pairs: Sequence[tuple[Expression, Expression]]) -> float:
    scale = max(
        (max(a.max_abs_coeff(), b.max_abs_coeff()) for a, b in pairs),
        default=0.0,
    )
    worst = max(((a - b).max_abs_coeff() for a, b in pairs), default=0.0)
    if worst == 0.0:
        return 0.0
    return worst / scale if scale > 0 else worst


def _common_base(expressions: Sequence[Expression]) -> float:
    bases = {e.base_point for e in expressions}
    if len(bases) > 1:
        raise BasePointMismatchError(f"Entries use several base points: {sorted(bases)}")
    return bases.pop() if bases else 0.0


@dataclass(frozen=True)
class MatrixExprFunction:
    """An n×n array of Expressions sharing one base point."""

    entries: tuple[tuple[Expression, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n == 0 or any(len(row) != n for row in self.entries):
            raise MatrixShapeError("MatrixExprFunction must be a non-empty square array")
        _common_base([e for row in self.entries for e in row])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Expression]]) -> MatrixExprFunction:
        return cls(tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, f: Expression, n: int) -> MatrixExprFunction:
        """f·I."""
        zero = Expression.zero(f.base_point)
        return cls(tuple(tuple(f if r == c else zero for c in range(n)) for r in range(n)))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def base_point(self) -> float:
        return self.entries[0][0].base_point

    def __getitem__(self, index: tuple[int, int]) -> Expression:
        r, c = index
        return self.entries[r][c]

    def map(self, fn: Callable[[Expression], Expression]) -> MatrixExprFunction:
        return MatrixExprFunction(tuple(tuple(fn(e) for e in row) for row in self.entries))

    def transpose(self) -> MatrixExprFunction:
        return MatrixExprFunction(
            tuple(tuple(self.entries[c][r] for c in range(self.n)) for r in range(self.n))
        )

    def __add__(self, other: MatrixExprFunction) -> MatrixExprFunction:
        return MatrixExprFunction(
            tuple(
                tuple(a + b for a, b in zip(ra, rb, strict=True))
                for ra, rb in zip(self.entries, other.entries, strict=True)
            )
        )

    def __sub__(self, other: MatrixExprFunction) -> MatrixExprFunction:
        return self + other.scale(-1.0)

    def scale(self, factor: Scalar) -> MatrixExprFunction:
        return self.map(lambda e: e.scale(factor))

    def max_abs_coeff(self) -> float:
        return max(e.max_abs_coeff() for row in self.entries for e in row)

    def coefficient_residual(self, other: MatrixExprFunction) -> float:
        """Largest coefficient of self - other relative to the largest coefficient of either."""
        if other.n != self.n:
            raise MatrixShapeError(f"Dimension mismatch: {self.n} vs {other.n}")
        return _coefficient_residual(
            [(self.entries[r][c], other.entries[r][c]) for r in range(self.n) for c in range(self.n)]
        )

    def equivalent(self, other: MatrixExprFunction, rel_tol: float | None = None) -> bool:
        """Entrywise canonical equality with a tolerance relative to the whole array."""
        if other.n != self.n or other.base_point != self.base_point:
            return False
        tol = get_settings().tolerances.symbolic_rel if rel_tol is None else rel_tol
        return self.coefficient_residual(other) <= tol

    def evaluate(self, x: float) -> NDArray[np.complex128]:
        return np.array(
            [[complex(e.evaluate(x)) for e in row] for row in self.entries], dtype=complex
        )

    def on_grid(self, xs: Sequence[float]) -> NDArray[np.complex128]:
        """Values with shape (len(xs), n, n)."""
        if not xs:
            return np.zeros((0, self.n, self.n), dtype=complex)
        points = np.asarray(xs, dtype=float)
        out = np.empty((len(points), self.n, self.n), dtype=complex)
        for r, row in enumerate(self.entries):
            for c, e in enumerate(row):
                out[:, r, c] = e.evaluate(points)
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "entries": [[e.to_dict() for e in row] for row in self.entries]}

    @classmethod
    def from_dict(cls, data: Any, path: str = "value") -> MatrixExprFunction:
        if not isinstance(data, dict) or not isinstance(data.get("entries"), list):
            raise SerializationError(f"{path}: expected an object with 'entries'")
        rows = []
        for r, row in enumerate(data["entries"]):
            if not isinstance(row, list):
                raise SerializationError(f"{path}.entries[{r}]: expected a list")
            rows.append(
                [Expression.from_dict(e, f"{path}.entries[{r}][{c}]") for c, e in enumerate(row)]
            )
        return cls.from_rows(rows)


@dataclass(frozen=True)
class VectorExprFunction:
    """A length-n vector of Expressions sharing one base point."""

    entries: tuple[Expression, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise MatrixShapeError("VectorExprFunction must have at least one entry")
        _common_base(list(self.entries))

    @classmethod
    def of(cls, entries: Sequence[Expression]) -> VectorExprFunction:
        return cls(tuple(entries))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def base_point(self) -> float:
        return self.entries[0].base_point

    def __getitem__(self, index: int) -> Expression:
        return self.entries[index]

    def map(self, fn: Callable[[Expression], Expression]) -> VectorExprFunction:
        return VectorExprFunction(tuple(fn(e) for e in self.entries))

    def coefficient_residual(self, other: VectorExprFunction) -> float:
        if other.n != self.n:
            raise MatrixShapeError(f"Length mismatch: {self.n} vs {other.n}")
        return _coefficient_residual(list(zip(self.entries, other.entries, strict=True)))

    def equivalent(self, other: VectorExprFunction, rel_tol: float | None = None) -> bool:
        if other.n != self.n or other.base_point != self.base_point:
            return False
        tol = get_settings().tolerances.symbolic_rel if rel_tol is None else rel_tol
        return self.coefficient_residual(other) <= tol

    def evaluate(self, x: float) -> NDArray[np.complex128]:
        return np.array([complex(e.evaluate(x)) for e in self.entries], dtype=complex)

    def on_grid(self, xs: Sequence[float]) -> NDArray[np.complex128]:
        """Values with shape (len(xs), n)."""
        if not xs:
            return np.zeros((0, self.n), dtype=complex)
        points = np.asarray(xs, dtype=float)
        return np.stack([e.evaluate(points) for e in self.entries], axis=1)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "entries": [e.to_dict() for e in self.entries]}
