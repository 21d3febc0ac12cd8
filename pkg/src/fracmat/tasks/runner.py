"""
Dispatch a TaskSpec to the library and collect a Report.

    apply         D^A f on the grid (plus a realization cross-check)
    apply-vector  D^A v on the grid
    compose       D^A D^B f on the grid (plus the expansion cross-check)
    verify        one identity suite
    oracle        closed form D^λ f against Grünwald-Letnikov (and quadrature
                  for integral orders)
    decompose     classification, spectrum and decomposition residuals
"""

from __future__ import annotations

from typing import Any

import numpy as np

from fracmat.config import Tolerances, get_settings
from fracmat.linalg import frobenius, matrix_to_json
from fracmat.logging_config import get_logger
from fracmat.observability import get_metrics, instrument, reset_metrics
from fracmat.operators import (
    LawCheck,
    apply_scalar,
    apply_vector,
    build_operator,
    compose_apply,
    compose_expansion,
    grid_residual,
    realization_check,
)
from fracmat.oracle import SampledFunction, gl_on_grid, rl_quadrature
from fracmat.serialization import complex_to_json
from fracmat.symbolic import differint_expr
from fracmat.tasks.report import Report
from fracmat.tasks.spec import TaskKind, TaskSpec
from fracmat.tasks.suites import run_suite

logger = get_logger(__name__)


def _apply(spec: TaskSpec, tolerances: Tolerances) -> Report:
    assert spec.matrix is not None and spec.function is not None
    op = build_operator(spec.matrix, spec.base_point)
    value = apply_scalar(op, spec.function, spec.path)
    grid = spec.grid_points()
    checks = [realization_check(op, spec.function, tolerances)] if op.spectral is not None else []
    return Report(
        task=spec.source,
        grid=grid,
        values=value.on_grid(grid),
        result={"operator": op.to_dict(), "value": value.to_dict()},
        checks=checks,
    )


def _apply_vector(spec: TaskSpec, tolerances: Tolerances) -> Report:
    assert spec.matrix is not None and spec.vector is not None
    op = build_operator(spec.matrix, spec.base_point)
    value = apply_vector(op, spec.vector, spec.path)
    grid = spec.grid_points()
    return Report(
        task=spec.source,
        grid=grid,
        values=value.on_grid(grid)[:, :, None],
        result={"operator": op.to_dict(), "value": value.to_dict()},
    )


def _compose(spec: TaskSpec, tolerances: Tolerances) -> Report:
    assert spec.matrix is not None and spec.matrix_b is not None and spec.function is not None
    op_a = build_operator(spec.matrix, spec.base_point)
    op_b = build_operator(spec.matrix_b, spec.base_point)
    value = compose_apply(op_a, op_b, spec.function)
    grid = spec.grid_points()
    values = value.on_grid(grid)
    checks = []
    if op_a.spectral is not None and op_b.spectral is not None:
        expansion = compose_expansion(op_a, op_b, spec.function)
        residual = grid_residual(expansion.on_grid(grid), values)
        tol = tolerances.expansion * op_a.condition * op_b.condition
        checks.append(LawCheck("expansion[spectral]", residual, tol))
    return Report(
        task=spec.source,
        grid=grid,
        values=values,
        result={
            "operator_a": op_a.to_dict(),
            "operator_b": op_b.to_dict(),
            "value": value.to_dict(),
        },
        checks=checks,
    )


def _oracle(spec: TaskSpec, tolerances: Tolerances) -> Report:
    assert spec.function is not None and spec.order is not None
    grid = spec.grid_points()
    closed = differint_expr(spec.function, spec.order)
    exact = np.asarray(closed.evaluate(np.asarray(grid)), dtype=complex)
    sampled = SampledFunction.from_expression(spec.function, upper=max(grid))
    numeric = np.asarray(
        gl_on_grid(sampled, spec.base_point, grid, spec.order, spec.oracle), dtype=complex
    )

    scale = np.where(np.abs(exact) > 0, np.abs(exact), 1.0)
    deltas = np.abs(numeric - exact) / scale
    checks = [LawCheck("oracle[grunwald-letnikov]", float(np.max(deltas)), tolerances.oracle_rel)]

    if spec.order.real < 0:
        quadrature = np.array(
            [rl_quadrature(sampled, spec.base_point, x, -spec.order) for x in grid], dtype=complex
        )
        checks.append(
            LawCheck(
                "oracle[quadrature]",
                float(np.max(np.abs(quadrature - exact) / scale)),
                tolerances.oracle_rel,
            )
        )

    return Report(
        task=spec.source,
        grid=grid,
        values=exact[:, None, None],
        residuals=[float(d) for d in deltas],
        result={"closed_form": closed.to_dict()},
        checks=checks,
    )


def _decompose(spec: TaskSpec, tolerances: Tolerances) -> Report:
    assert spec.matrix is not None
    op = build_operator(spec.matrix, spec.base_point)
    norm = max(1.0, frobenius(op.matrix))
    result: dict[str, Any] = {
        "classification": str(op.classification.kind),
        "commutator_norm": op.classification.commutator_norm,
        "realization_tag": str(op.realization),
        "condition": op.condition,
    }
    checks: list[LawCheck] = []
    if op.spectral is not None:
        data = op.spectral
        residuals = data.invariant_residuals(op.matrix)
        result.update(
            eigenvalues=[complex_to_json(lam) for lam in data.eigenvalues],
            multiplicities=list(data.multiplicities),
            projectors=[matrix_to_json(g) for g in data.projectors],
            residuals=residuals,
        )
        limit = tolerances.projector * norm * data.condition
        checks = [LawCheck(f"projector[{name}]", value, limit) for name, value in sorted(residuals.items())]
    else:
        assert op.jordan is not None
        result.update(
            segments=[
                {"eigenvalue": complex_to_json(s.eigenvalue), "size": s.size}
                for s in op.jordan.segments
            ],
            residuals={"reconstruction": op.jordan.reconstruction_residual},
        )
        checks = [
            LawCheck(
                "jordan[reconstruction]",
                op.jordan.reconstruction_residual,
                tolerances.reconstruction,
            )
        ]
    return Report(task=spec.source, result=result, checks=checks)


def _verify(spec: TaskSpec, tolerances: Tolerances) -> Report:
    return Report(task=spec.source, checks=run_suite(spec, tolerances))


_DISPATCH = {
    TaskKind.APPLY: _apply,
    TaskKind.APPLY_VECTOR: _apply_vector,
    TaskKind.COMPOSE: _compose,
    TaskKind.VERIFY: _verify,
    TaskKind.ORACLE: _oracle,
    TaskKind.DECOMPOSE: _decompose,
}


@instrument
def run(spec: TaskSpec, include_timing: bool = False) -> Report:
    """
    Execute a TaskSpec.

    Args:
        spec: Validated task
        include_timing: Attach per-operation timings to the report

    Returns:
        Report whose ``passed`` is True iff every check met its tolerance

    Raises:
        FracmatError: Domain errors from the library, unchanged
    """
    tolerances = get_settings().with_tolerance_overrides(spec.tolerances).tolerances
    if include_timing:
        reset_metrics()

    report = _DISPATCH[spec.task](spec, tolerances)

    for check in report.failed_checks():
        logger.warning(
            "Check %s failed: residual %.3e vs tolerance %.3e (%s)",
            check.name,
            check.residual,
            check.tolerance,
            check.comparison,
        )
    logger.info(
        "Task %s finished: %d check(s), %s",
        spec.task,
        len(report.checks),
        "passed" if report.passed else "FAILED",
    )
    if include_timing:
        report.timing = get_metrics().timing_table()
    return report
