"""
TaskSpec: one batch job read from a JSON document.

Validation reports the dotted path of the first offending field
(``grid.start``, ``function.terms[0].coeff``) through TaskSpecError.

Example document:

    {
      "task": "verify",
      "suite": "inverse-pair",
      "base_point": 0.0,
      "matrix": [[0.5, 0.0], [0.0, 0.25]],
      "function": {"terms": [{"coeff": 1.0, "exponent": 1.0}]}
    }
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

import numpy as np

from fracmat.config import Tolerances
from fracmat.errors import FracmatError, MatrixShapeError, SerializationError, TaskSpecError
from fracmat.linalg import CMatrix, matrix_from_json
from fracmat.operators import ApplyPath, VectorExprFunction, standard_grid
from fracmat.oracle import OracleConfig, named_function
from fracmat.serialization import complex_from_json, loads, real_from_json
from fracmat.symbolic import Expression


class TaskKind(StrEnum):
    APPLY = "apply"
    APPLY_VECTOR = "apply-vector"
    COMPOSE = "compose"
    VERIFY = "verify"
    ORACLE = "oracle"
    DECOMPOSE = "decompose"


class Suite(StrEnum):
    INVERSE_PAIR = "inverse-pair"
    ADDITIVITY = "additivity"
    SHIFT = "shift"
    TRANSPOSE = "transpose"
    TRACE = "trace"
    JORDAN = "jordan"
    LEIBNIZ = "leibniz"
    COMPOSITION = "composition"
    NONCOMMUTING = "noncommuting"


_KNOWN_FIELDS = frozenset(
    {
        "task",
        "suite",
        "base_point",
        "matrix",
        "matrix_b",
        "function",
        "g_function",
        "vector",
        "order",
        "outer_order",
        "shifts",
        "terms",
        "path",
        "grid",
        "oracle",
        "tolerances",
    }
)

# Fields each task or suite cannot run without
_REQUIRED_BY_TASK: dict[TaskKind, tuple[str, ...]] = {
    TaskKind.APPLY: ("matrix", "function"),
    TaskKind.APPLY_VECTOR: ("matrix", "vector"),
    TaskKind.COMPOSE: ("matrix", "matrix_b", "function"),
    TaskKind.VERIFY: ("suite",),
    TaskKind.ORACLE: ("function", "order"),
    TaskKind.DECOMPOSE: ("matrix",),
}

_REQUIRED_BY_SUITE: dict[Suite, tuple[str, ...]] = {
    Suite.INVERSE_PAIR: ("matrix", "function"),
    Suite.ADDITIVITY: ("matrix", "matrix_b", "function"),
    Suite.SHIFT: ("matrix", "function"),
    Suite.TRANSPOSE: ("matrix", "matrix_b", "function"),
    Suite.TRACE: ("matrix", "function"),
    Suite.JORDAN: ("matrix", "function"),
    Suite.LEIBNIZ: ("function", "g_function", "order"),
    Suite.COMPOSITION: ("function", "order", "outer_order"),
    Suite.NONCOMMUTING: ("matrix", "matrix_b", "function"),
}


@dataclass(frozen=True)
class GridSpec:
    """Evaluation points start, ..., stop (inclusive), evenly spaced."""

    start: float
    stop: float
    points: int

    def values(self) -> list[float]:
        return [float(x) for x in np.linspace(self.start, self.stop, self.points)]

    def to_dict(self) -> dict[str, Any]:
        return {"start": self.start, "stop": self.stop, "points": self.points}


@dataclass(frozen=True)
class TaskSpec:
    """
    A validated batch job.

    Attributes:
        task: What to run
        base_point: Lower limit a shared by every function
        matrix: Order matrix A
        matrix_b: Second order matrix B (compose and pair suites)
        function: f
        g_function: Second factor g (leibniz suite)
        vector: Vector argument (apply-vector)
        order: Scalar order λ (oracle) or q (leibniz, composition)
        outer_order: Outer order p (composition)
        shifts: Integer shifts m (shift suite)
        terms: Number of Leibniz terms; defaults to the degree of g
        path: Application path for apply tasks
        suite: Identity suite (verify)
        grid: Evaluation points
        oracle: Grünwald-Letnikov resolution
        tolerances: Per-run comparison tolerance overrides
        source: The document as read, echoed into the report
    """

    task: TaskKind
    base_point: float = 0.0
    matrix: CMatrix | None = None
    matrix_b: CMatrix | None = None
    function: Expression | None = None
    g_function: Expression | None = None
    vector: VectorExprFunction | None = None
    order: complex | None = None
    outer_order: complex | None = None
    shifts: tuple[int, ...] = (1, 2)
    terms: int | None = None
    path: ApplyPath | None = None
    suite: Suite | None = None
    grid: GridSpec | None = None
    oracle: OracleConfig = field(default_factory=OracleConfig.from_settings)
    tolerances: dict[str, float] = field(default_factory=dict)
    source: dict[str, Any] = field(default_factory=dict)

    def grid_points(self) -> list[float]:
        return self.grid.values() if self.grid is not None else standard_grid(self.base_point)


def _enum(cls: type[StrEnum], value: Any, path: str) -> Any:
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in cls)  # type: ignore[attr-defined]
        raise TaskSpecError(path, f"unknown value {value!r}; expected one of {choices}") from None


def _whole(value: Any, path: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise TaskSpecError(path, f"expected a whole number >= {minimum}")
    return value


def _expression(data: Any, base_point: float, path: str) -> Expression:
    """An Expression document, or {"named": ..., "params": {...}} from the registry."""
    if isinstance(data, dict) and "named" in data:
        unknown = set(data) - {"named", "params"}
        if unknown:
            raise TaskSpecError(path, f"unknown keys {sorted(unknown)}")
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise TaskSpecError(f"{path}.params", "expected an object")
        return named_function(str(data["named"]), params, base_point)
    if isinstance(data, dict) and "base_point" not in data:
        data = {**data, "base_point": base_point}
    expr = Expression.from_dict(data, path)
    if expr.base_point != base_point:
        raise TaskSpecError(
            f"{path}.base_point",
            f"{expr.base_point} differs from the task base point {base_point}",
        )
    return expr


def _grid(data: Any, base_point: float) -> GridSpec:
    if not isinstance(data, dict):
        raise TaskSpecError("grid", "expected an object with start, stop and points")
    unknown = set(data) - {"start", "stop", "points"}
    if unknown:
        raise TaskSpecError("grid", f"unknown keys {sorted(unknown)}")
    for key in ("start", "stop", "points"):
        if key not in data:
            raise TaskSpecError(f"grid.{key}", "required")
    start = real_from_json(data["start"], "grid.start")
    stop = real_from_json(data["stop"], "grid.stop")
    points = _whole(data["points"], "grid.points", minimum=2)
    if not start > base_point:
        raise TaskSpecError("grid.start", f"must exceed the base point {base_point}")
    if not stop > start:
        raise TaskSpecError("grid.stop", "must exceed grid.start")
    return GridSpec(start, stop, points)


def _oracle(data: Any) -> OracleConfig:
    if not isinstance(data, dict):
        raise TaskSpecError("oracle", "expected an object")
    unknown = set(data) - {"steps", "richardson_levels"}
    if unknown:
        raise TaskSpecError("oracle", f"unknown keys {sorted(unknown)}")
    defaults = OracleConfig.from_settings()
    steps = _whole(data.get("steps", defaults.steps), "oracle.steps", minimum=16)
    levels = _whole(
        data.get("richardson_levels", defaults.richardson_levels), "oracle.richardson_levels"
    )
    try:
        return OracleConfig(steps=steps, richardson_levels=levels)
    except FracmatError as e:
        raise TaskSpecError("oracle", str(e)) from e


def _tolerances(data: Any) -> dict[str, float]:
    if not isinstance(data, dict):
        raise TaskSpecError("tolerances", "expected an object")
    known = set(Tolerances.__dataclass_fields__)
    overrides = {}
    for key, value in sorted(data.items()):
        if key not in known:
            raise TaskSpecError(f"tolerances.{key}", f"unknown tolerance; expected one of {sorted(known)}")
        number = real_from_json(value, f"tolerances.{key}")
        if not number > 0:
            raise TaskSpecError(f"tolerances.{key}", "must be positive")
        overrides[key] = number
    return overrides


def parse_task_spec(data: Any) -> TaskSpec:
    """
    Validate a decoded TaskSpec document.

    Raises:
        TaskSpecError: With the dotted path of the first offending field
    """
    if not isinstance(data, dict):
        raise TaskSpecError("", "TaskSpec must be a JSON object")
    unknown = set(data) - _KNOWN_FIELDS
    if unknown:
        raise TaskSpecError(sorted(unknown)[0], "unknown field")
    if "task" not in data:
        raise TaskSpecError("task", "required")

    task = _enum(TaskKind, data["task"], "task")
    suite = _enum(Suite, data["suite"], "suite") if "suite" in data else None
    required = _REQUIRED_BY_TASK[task] + (_REQUIRED_BY_SUITE[suite] if suite else ())
    for name in required:
        if name not in data:
            where = f"suite {suite}" if suite and name in _REQUIRED_BY_SUITE[suite] else f"task {task}"
            raise TaskSpecError(name, f"required by {where}")

    try:
        base_point = real_from_json(data.get("base_point", 0.0), "base_point")
        kwargs: dict[str, Any] = {"task": task, "suite": suite, "base_point": base_point}
        for name in ("matrix", "matrix_b"):
            if name in data:
                try:
                    kwargs[name] = matrix_from_json(data[name], name)
                except MatrixShapeError as e:
                    raise TaskSpecError(name, str(e)) from e
        for name in ("function", "g_function"):
            if name in data:
                kwargs[name] = _expression(data[name], base_point, name)
        if "vector" in data:
            if not isinstance(data["vector"], list) or not data["vector"]:
                raise TaskSpecError("vector", "expected a non-empty list of functions")
            kwargs["vector"] = VectorExprFunction.of(
                [_expression(e, base_point, f"vector[{i}]") for i, e in enumerate(data["vector"])]
            )
        for name in ("order", "outer_order"):
            if name in data:
                kwargs[name] = complex_from_json(data[name], name)
        if "shifts" in data:
            if not isinstance(data["shifts"], list) or not data["shifts"]:
                raise TaskSpecError("shifts", "expected a non-empty list of whole numbers")
            kwargs["shifts"] = tuple(
                _whole(m, f"shifts[{i}]") for i, m in enumerate(data["shifts"])
            )
        if "terms" in data:
            kwargs["terms"] = _whole(data["terms"], "terms")
        if "path" in data:
            kwargs["path"] = _enum(ApplyPath, data["path"], "path")
        if "grid" in data:
            kwargs["grid"] = _grid(data["grid"], base_point)
        if "oracle" in data:
            kwargs["oracle"] = _oracle(data["oracle"])
        if "tolerances" in data:
            kwargs["tolerances"] = _tolerances(data["tolerances"])
    except TaskSpecError:
        raise
    except SerializationError as e:
        path, _, message = str(e).partition(": ")
        raise TaskSpecError(path, message or str(e)) from e
    except FracmatError as e:
        raise TaskSpecError("", str(e)) from e

    spec = TaskSpec(source=data, **kwargs)
    if spec.vector is not None and spec.matrix is not None and spec.vector.n != spec.matrix.shape[0]:
        raise TaskSpecError("vector", f"length {spec.vector.n} does not match the matrix dimension")
    if spec.matrix_b is not None and spec.matrix is not None and spec.matrix_b.shape != spec.matrix.shape:
        raise TaskSpecError("matrix_b", "must have the same dimension as matrix")
    return spec


def load_task_spec(path: Path | str) -> TaskSpec:
    """
    Read and validate a TaskSpec file.

    Raises:
        TaskSpecError: If the file cannot be read, is not JSON or fails validation
    """
    file = Path(path)
    try:
        text = file.read_text(encoding="utf-8")
    except OSError as e:
        raise TaskSpecError("", f"cannot read {file}: {e.strerror or e}") from e
    try:
        data = loads(text, str(file))
    except SerializationError as e:
        raise TaskSpecError("", str(e)) from e
    return parse_task_spec(data)
