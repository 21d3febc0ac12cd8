"""Tests for the fracmat command line."""

from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from fracmat import __version__
from fracmat.cli import EXIT_ERROR, EXIT_FAILED_CHECK, EXIT_OK, main
from fracmat.logging_config import reset_logging
from fracmat.tasks import CSV_COLUMNS, bundled_specs

DATA_DIR = Path(__file__).parent / "data"
GOLDEN_DIR = DATA_DIR / "golden"
SRC_DIR = Path(__file__).resolve().parents[1] / "src"


@pytest.fixture(autouse=True)
def clean_logging():
    """Each invocation configures logging afresh against the captured stderr."""
    reset_logging()
    yield
    reset_logging()


@pytest.fixture
def apply_zero() -> str:
    return str(bundled_specs()["apply_zero"])


class TestExitStatus:
    """Tests for exit codes."""

    def test_passing_task(self, apply_zero: str, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--spec", apply_zero]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report["passed"] is True

    def test_failed_check(self, capsys: pytest.CaptureFixture[str]) -> None:
        status = main(["--spec", str(DATA_DIR / "failing_oracle_tolerance.json")])
        assert status == EXIT_FAILED_CHECK
        captured = capsys.readouterr()
        assert json.loads(captured.out)["passed"] is False
        assert "oracle[grunwald-letnikov]" in captured.err

    def test_invalid_spec(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--spec", str(DATA_DIR / "invalid_grid.json")]) == EXIT_ERROR
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "grid.start" in captured.err

    def test_missing_spec_file(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--spec", str(tmp_path / "absent.json")]) == EXIT_ERROR
        assert "cannot read" in capsys.readouterr().err

    def test_domain_error(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        task = tmp_path / "noncommuting_additivity.json"
        task.write_text(
            json.dumps(
                {
                    "task": "verify",
                    "suite": "additivity",
                    "matrix": [[-0.5, 1.0], [0.0, -1.5]],
                    "matrix_b": [[-1.5, 0.0], [1.0, -0.5]],
                    "function": {"terms": [{"coeff": 1.0, "exponent": 1.0}]},
                }
            ),
            encoding="utf-8",
        )
        assert main(["--spec", str(task)]) == EXIT_ERROR
        assert "PreconditionError" in capsys.readouterr().err

    def test_spec_is_required(self) -> None:
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        with pytest.raises(SystemExit) as excinfo:
            main(["--version"])
        assert excinfo.value.code == 0
        assert __version__ in capsys.readouterr().out


class TestOutput:
    """Tests for output formats and destinations."""

    def test_csv_to_stdout(self, apply_zero: str, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--spec", apply_zero, "--format", "csv"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_out_file(
        self, apply_zero: str, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        out = tmp_path / "report.json"
        assert main(["--spec", apply_zero, "--out", str(out)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(out.read_text(encoding="utf-8"))["passed"] is True

    def test_reports_are_byte_identical(self, tmp_path: Path) -> None:
        spec = str(bundled_specs()["compose_symmetric"])
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert main(["--spec", spec, "--out", str(first)]) == EXIT_OK
        reset_logging()
        assert main(["--spec", spec, "--out", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()
        assert first.read_bytes().endswith(b"\n")
        assert b"\r\n" not in first.read_bytes()

    def test_timing(self, apply_zero: str, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--spec", apply_zero, "--timing"]) == EXIT_OK
        timing = json.loads(capsys.readouterr().out)["timing"]
        assert timing["apply_scalar"]["calls"] >= 1

    def test_verbose_logs_progress(self, apply_zero: str, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["--spec", apply_zero, "--verbose"]) == EXIT_OK
        err = capsys.readouterr().err
        assert "Running apply task" in err
        assert "Operation metrics" in err


class TestGoldenFiles:
    """
    Bundled TaskSpecs against the reports stored in tests/data/golden.

    Run ``pytest --update-golden`` to rewrite them after an intended change;
    a missing golden file is written and the case skipped.
    """

    @pytest.mark.parametrize("fmt", ["json", "csv"])
    @pytest.mark.parametrize("name", sorted(bundled_specs()))
    def test_report_matches_golden(
        self, name: str, fmt: str, tmp_path: Path, update_golden: bool
    ) -> None:
        out = tmp_path / f"{name}.{fmt}"
        spec = str(bundled_specs()[name])
        assert main(["--spec", spec, "--format", fmt, "--out", str(out)]) == EXIT_OK
        golden = GOLDEN_DIR / f"{name}.{fmt}"
        if update_golden or not golden.exists():
            golden.parent.mkdir(parents=True, exist_ok=True)
            golden.write_bytes(out.read_bytes())
            pytest.skip(f"wrote {golden.name}")
        assert out.read_bytes() == golden.read_bytes()

    def test_every_bundled_spec_is_covered(self) -> None:
        assert sorted(bundled_specs()) == [
            "apply_zero",
            "compose_symmetric",
            "decompose_jordan",
            "oracle_half_derivative",
            "verify_inverse_pair",
            "verify_trace",
        ]


class TestModuleEntryPoint:
    """Tests for ``python -m fracmat``."""

    def test_runs_as_module(self, apply_zero: str, tmp_path: Path) -> None:
        env = {**os.environ, "FRACMAT_CONFIG_DIR": str(tmp_path)}
        env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(SRC_DIR), env.get("PYTHONPATH")]))
        completed = subprocess.run(
            [sys.executable, "-m", "fracmat", "--spec", apply_zero, "--format", "csv"],
            capture_output=True,
            text=True,
            env=env,
            check=False,
            timeout=120,
        )
        assert completed.returncode == EXIT_OK, completed.stderr
        assert completed.stdout.startswith(",".join(CSV_COLUMNS))
