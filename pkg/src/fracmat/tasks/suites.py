"""Identity suites run by ``task: verify``."""

from __future__ import annotations

from collections.abc import Callable

from fracmat.config import Tolerances
from fracmat.operators import (
    ApplyPath,
    LawCheck,
    additivity_check,
    build_operator,
    composition_check,
    determinant_check,
    inverse_pair_check,
    inverse_witness_check,
    jordan_superdiagonal_check,
    leibniz_check,
    noncommuting_checks,
    realization_check,
    shift_check,
    trace_law_check,
    transpose_check,
)
from fracmat.symbolic import Expression
from fracmat.tasks.spec import Suite, TaskSpec

SuiteRunner = Callable[[TaskSpec, Tolerances], list[LawCheck]]

# (x - a)^(-1/2) loses its D^(1/2) to a Γ pole, so D^(-1/2) D^(1/2) f = 0 ≠ f
_WITNESS_ORDER = 0.5
_WITNESS_EXPONENT = -0.5


def _inverse_pair(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.function is not None
    op = build_operator(spec.matrix, spec.base_point)
    grid = spec.grid_points()
    if op.spectral is None:
        return [inverse_pair_check(op, spec.function, ApplyPath.JORDAN, grid, tolerances)]
    return [
        inverse_pair_check(op, spec.function, path, grid, tolerances)
        for path in (ApplyPath.SPECTRAL, ApplyPath.SIMILARITY)
    ] + [realization_check(op, spec.function, tolerances)]


def _additivity(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.matrix_b is not None and spec.function is not None
    op_a = build_operator(spec.matrix, spec.base_point)
    op_b = build_operator(spec.matrix_b, spec.base_point)
    return [additivity_check(op_a, op_b, spec.function, tolerances)]


def _shift(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.function is not None
    op = build_operator(spec.matrix, spec.base_point)
    return [shift_check(op, m, spec.function, tolerances) for m in spec.shifts]


def _transpose(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.matrix_b is not None and spec.function is not None
    op_a = build_operator(spec.matrix, spec.base_point)
    op_b = build_operator(spec.matrix_b, spec.base_point)
    return [transpose_check(op_a, op_b, spec.function, spec.grid_points(), tolerances)]


def _trace(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.function is not None
    op = build_operator(spec.matrix, spec.base_point)
    return [
        trace_law_check(op, spec.function, tolerances),
        determinant_check(op, spec.function, tolerances),
    ]


def _jordan(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.function is not None
    op = build_operator(spec.matrix, spec.base_point)
    return [jordan_superdiagonal_check(op, spec.function, spec.grid_points(), tolerances)]


def _leibniz(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.function is not None and spec.g_function is not None and spec.order is not None
    terms = spec.terms
    if terms is None:
        terms = max((int(round(t.exponent.real)) for t in spec.g_function.terms), default=0)
    return [leibniz_check(spec.function, spec.g_function, spec.order, terms, tolerances)]


def _composition(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.function is not None and spec.order is not None and spec.outer_order is not None
    grid = spec.grid_points()
    witness = Expression.power(_WITNESS_EXPONENT, base_point=spec.base_point)
    return [
        composition_check(spec.outer_order, spec.order, spec.function, grid, tolerances),
        inverse_witness_check(_WITNESS_ORDER, witness, grid),
    ]


def _noncommuting(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    assert spec.matrix is not None and spec.matrix_b is not None and spec.function is not None
    op_a = build_operator(spec.matrix, spec.base_point)
    op_b = build_operator(spec.matrix_b, spec.base_point)
    return noncommuting_checks(op_a, op_b, spec.function, spec.grid_points(), tolerances)


SUITES: dict[Suite, SuiteRunner] = {
    Suite.INVERSE_PAIR: _inverse_pair,
    Suite.ADDITIVITY: _additivity,
    Suite.SHIFT: _shift,
    Suite.TRANSPOSE: _transpose,
    Suite.TRACE: _trace,
    Suite.JORDAN: _jordan,
    Suite.LEIBNIZ: _leibniz,
    Suite.COMPOSITION: _composition,
    Suite.NONCOMMUTING: _noncommuting,
}


def run_suite(spec: TaskSpec, tolerances: Tolerances) -> list[LawCheck]:
    """Run the suite named by spec.suite."""
    assert spec.suite is not None
    return SUITES[spec.suite](spec, tolerances)
