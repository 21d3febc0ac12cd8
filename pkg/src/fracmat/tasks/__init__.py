"""
Batch tasks: TaskSpec documents in, Reports out.

Usage:
    from fracmat.tasks import emit, load_task_spec, run

    report = run(load_task_spec("task.json"))
    print(emit(report, "json"))
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path

from fracmat.tasks.report import CSV_COLUMNS, Report, ReportFormat, emit
from fracmat.tasks.runner import run
from fracmat.tasks.spec import GridSpec, Suite, TaskKind, TaskSpec, load_task_spec, parse_task_spec
from fracmat.tasks.suites import SUITES, run_suite


def bundled_specs() -> dict[str, Path]:
    """The example TaskSpecs shipped with the package, by file stem."""
    folder = importlib.resources.files("fracmat.tasks") / "bundled"
    return {
        Path(entry.name).stem: Path(str(entry))
        for entry in sorted(folder.iterdir(), key=lambda e: e.name)
        if entry.name.endswith(".json")
    }


__all__ = [
    "CSV_COLUMNS",
    "SUITES",
    "GridSpec",
    "Report",
    "ReportFormat",
    "Suite",
    "TaskKind",
    "TaskSpec",
    "bundled_specs",
    "emit",
    "load_task_spec",
    "parse_task_spec",
    "run",
    "run_suite",
]
