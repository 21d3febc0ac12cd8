"""
Reports and their JSON / CSV encodings.

JSON keys are sorted and floats carry 17 significant digits, so a
report is byte-identical across runs of the same TaskSpec on one platform.
Timing is only included on request since it varies between runs.

CSV flattens the per-point values into rows of
``x, row, col, re, im, residual`` (17 significant digits); a report without
grid values produces the header alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from fracmat.operators import LawCheck
from fracmat.serialization import complex_to_json, dumps

CSV_COLUMNS = ("x", "row", "col", "re", "im", "residual")

ReportFormat = Literal["json", "csv"]


@dataclass
class Report:
    """
    Outcome of one TaskSpec.

    Attributes:
        task: The TaskSpec document as read
        grid: Evaluation points
        values: Array of shape (len(grid), rows, cols); vectors use cols = 1
        residuals: Optional per-point residual aligned with grid
        result: Task-specific symbolic or structural output
        checks: Law and tolerance checks
        timing: Per-operation call counts and seconds, when requested
    """

    task: dict[str, Any]
    grid: list[float] = field(default_factory=list)
    values: NDArray[np.complex128] = field(
        default_factory=lambda: np.zeros((0, 0, 0), dtype=complex)
    )
    residuals: list[float] | None = None
    result: dict[str, Any] = field(default_factory=dict)
    checks: list[LawCheck] = field(default_factory=list)
    timing: dict[str, dict[str, float]] | None = None

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed_checks(self) -> list[LawCheck]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> dict[str, Any]:
        points = []
        for g, x in enumerate(self.grid):
            entry: dict[str, Any] = {
                "x": x,
                "value": [[complex_to_json(v) for v in row] for row in self.values[g]],
            }
            if self.residuals is not None:
                entry["residual"] = self.residuals[g]
            points.append(entry)
        payload: dict[str, Any] = {
            "task": self.task,
            "grid": list(self.grid),
            "values": points,
            "result": self.result,
            "checks": [check.to_dict() for check in self.checks],
            "passed": self.passed,
        }
        if self.timing is not None:
            payload["timing"] = self.timing
        return payload


def _csv_frame(report: Report) -> pd.DataFrame:
    if not report.grid or report.values.size == 0:
        return pd.DataFrame(columns=list(CSV_COLUMNS))
    g, rows, cols = report.values.shape
    x = np.repeat(np.asarray(report.grid, dtype=float), rows * cols)
    row = np.tile(np.repeat(np.arange(rows), cols), g)
    col = np.tile(np.arange(cols), g * rows)
    flat = report.values.reshape(-1)
    residual = (
        np.repeat(np.asarray(report.residuals, dtype=float), rows * cols)
        if report.residuals is not None
        else np.full(flat.shape, np.nan)
    )
    return pd.DataFrame(
        {
            "x": x,
            "row": row,
            "col": col,
            # +0.0 turns -0.0 into 0.0 so the text does not depend on how a zero arose
            "re": flat.real + 0.0,
            "im": flat.imag + 0.0,
            "residual": residual,
        },
        columns=list(CSV_COLUMNS),
    )


def emit(report: Report, fmt: ReportFormat = "json") -> str:
    """
    Serialize a report.

    Args:
        report: Report to encode
        fmt: "json" (full report) or "csv" (flattened grid values)
    """
    if fmt == "json":
        return dumps(report.to_dict())
    if fmt == "csv":
        return _csv_frame(report).to_csv(
            index=False, float_format="%.17g", lineterminator="\n", na_rep=""
        )
    raise ValueError(f"Unknown report format {fmt!r}; expected 'json' or 'csv'")
