"""
Settings loader

Loads numerical settings from YAML and exposes them as frozen dataclasses.

Resolution order:
1. Explicit path argument
2. User file: <user config dir>/fracmat.yaml (FRACMAT_CONFIG_DIR overrides the dir)
3. Bundled defaults: fracmat/config/tolerances.yaml

User files are partial: their keys are layered over the bundled defaults.
"""

from __future__ import annotations

import importlib.resources
import os
from dataclasses import dataclass, field, fields, replace
from functools import lru_cache
from pathlib import Path
from typing import Any

import yaml

from fracmat.logging_config import get_logger
from fracmat.paths import get_user_config_path

logger = get_logger(__name__)

TOL_SCALE_ENV_VAR = "FRACMAT_TOL_SCALE"
MAX_WORKERS_ENV_VAR = "FRACMAT_MAX_WORKERS"


@dataclass(frozen=True)
class Tolerances:
    """Comparison tolerances; every field is multiplied by FRACMAT_TOL_SCALE."""

    symbolic_rel: float = 1e-12
    inverse_pair: float = 1e-8
    composition: float = 1e-10
    expansion: float = 1e-10
    transpose: float = 1e-9
    oracle_rel: float = 1e-4
    jordan_fd_abs: float = 1e-4
    projector: float = 1e-10
    reconstruction: float = 1e-8
    matrix_function: float = 1e-10

    def scaled(self, factor: float) -> Tolerances:
        """Return a copy with every tolerance multiplied by factor."""
        return replace(
            self, **{f.name: getattr(self, f.name) * factor for f in fields(self)}
        )


@dataclass(frozen=True)
class Gaps:
    """Minimum residuals that certify a law genuinely fails."""

    noncommuting: float = 1e-3
    witness: float = 0.1


@dataclass(frozen=True)
class SymbolicSettings:
    """Structural thresholds of the power-log engine."""

    key_tol: float = 1e-12
    pole_tol: float = 1e-12
    max_log_power: int = 3


@dataclass(frozen=True)
class LinalgSettings:
    """Thresholds for decompositions."""

    cluster_tol: float = 1e-8
    jordan_cluster_tol: float = 1e-3
    rank_tol: float = 1e-8
    normal_tol: float = 1e-10
    condition_cap: float = 1e8
    max_dimension: int = 32
    max_jordan_dimension: int = 8
    qr_max_sweeps: int = 60


@dataclass(frozen=True)
class OracleSettings:
    """Defaults for the numerical oracle."""

    steps: int = 16384
    richardson_levels: int = 1
    fd_step: float = 1e-4
    grading: float = 3.0
    gauss_points: int = 16
    initial_cells: int = 32
    max_cells: int = 16384
    quadrature_rtol: float = 1e-7


@dataclass(frozen=True)
class RuntimeSettings:
    """Execution defaults for the CLI and parallel helpers."""

    max_workers: int = 4
    grid_start: float = 0.5
    grid_stop: float = 2.0
    grid_points: int = 7


@dataclass(frozen=True)
class Settings:
    """All fracmat settings."""

    tolerances: Tolerances = field(default_factory=Tolerances)
    gaps: Gaps = field(default_factory=Gaps)
    symbolic: SymbolicSettings = field(default_factory=SymbolicSettings)
    linalg: LinalgSettings = field(default_factory=LinalgSettings)
    oracle: OracleSettings = field(default_factory=OracleSettings)
    runtime: RuntimeSettings = field(default_factory=RuntimeSettings)
    tol_scale: float = 1.0

    def with_tolerance_overrides(self, overrides: dict[str, float]) -> Settings:
        """Return a copy with individual comparison tolerances replaced.

        Overrides are taken as given (already in final units) and are not
        rescaled by tol_scale.
        """
        _check_section("tolerances", overrides, Tolerances)
        return replace(
            self,
            tolerances=replace(
                self.tolerances, **{k: float(v) for k, v in overrides.items()}
            ),
        )


_SECTIONS: dict[str, type] = {
    "tolerances": Tolerances,
    "gaps": Gaps,
    "symbolic": SymbolicSettings,
    "linalg": LinalgSettings,
    "oracle": OracleSettings,
    "runtime": RuntimeSettings,
}


def _check_section(name: str, values: Any, cls: type) -> None:
    """Validate one YAML section against the dataclass it feeds."""
    if not isinstance(values, dict):
        raise ValueError(f"Config section '{name}' must be a mapping")

    known = {f.name: f for f in fields(cls)}
    for key, value in values.items():
        if key not in known:
            raise ValueError(
                f"Unknown key '{name}.{key}'; expected one of {sorted(known)}"
            )
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(f"Config value '{name}.{key}' must be a number")
        if known[key].type == "int" and float(value) != int(value):
            raise ValueError(f"Config value '{name}.{key}' must be an integer")
        if value < 0:
            raise ValueError(f"Config value '{name}.{key}' must be non-negative")


def _read_yaml(text: str, origin: str) -> dict[str, Any]:
    data = yaml.safe_load(text)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {origin} is not a YAML mapping")
    for name, values in data.items():
        if name not in _SECTIONS:
            raise ValueError(
                f"Unknown config section '{name}' in {origin}; "
                f"expected one of {sorted(_SECTIONS)}"
            )
        _check_section(name, values, _SECTIONS[name])
    return data


def _bundled_config() -> dict[str, Any]:
    files = importlib.resources.files("fracmat.config")
    content = (files / "tolerances.yaml").read_text(encoding="utf-8")
    return _read_yaml(content, "bundled tolerances.yaml")


def _tol_scale_from_env() -> float:
    raw = os.environ.get(TOL_SCALE_ENV_VAR)
    if raw is None or raw.strip() == "":
        return 1.0
    try:
        scale = float(raw)
    except ValueError as e:
        raise ValueError(f"{TOL_SCALE_ENV_VAR} must be a real number, got {raw!r}") from e
    if not scale >= 1.0:
        raise ValueError(f"{TOL_SCALE_ENV_VAR} must be >= 1, got {scale}")
    return scale


def _build(cls: type, values: dict[str, Any]) -> Any:
    kwargs = {}
    for f in fields(cls):
        if f.name in values:
            kwargs[f.name] = int(values[f.name]) if f.type == "int" else float(values[f.name])
    return cls(**kwargs)


def load_settings(config_path: Path | str | None = None) -> Settings:
    """
    Load settings, layering a user file over the bundled defaults.

    Args:
        config_path: Explicit YAML file. If None, the user config file is used
            when it exists.

    Returns:
        Settings with FRACMAT_TOL_SCALE already applied to the tolerances

    Raises:
        FileNotFoundError: If an explicit config_path does not exist
        ValueError: If a file or FRACMAT_TOL_SCALE is malformed
    """
    merged = _bundled_config()

    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
    else:
        path = get_user_config_path()
        if not path.exists():
            path = None  # type: ignore[assignment]

    if path is not None:
        user = _read_yaml(path.read_text(encoding="utf-8"), str(path))
        logger.debug("Layering user settings from %s", path)
        for name, values in user.items():
            merged[name] = {**merged.get(name, {}), **values}

    scale = _tol_scale_from_env()
    runtime_values = dict(merged.get("runtime", {}))
    env_workers = os.environ.get(MAX_WORKERS_ENV_VAR)
    if env_workers:
        try:
            runtime_values["max_workers"] = max(1, int(env_workers))
        except ValueError as e:
            raise ValueError(
                f"{MAX_WORKERS_ENV_VAR} must be an integer, got {env_workers!r}"
            ) from e

    settings = Settings(
        tolerances=_build(Tolerances, merged.get("tolerances", {})).scaled(scale),
        gaps=_build(Gaps, merged.get("gaps", {})),
        symbolic=_build(SymbolicSettings, merged.get("symbolic", {})),
        linalg=_build(LinalgSettings, merged.get("linalg", {})),
        oracle=_build(OracleSettings, merged.get("oracle", {})),
        runtime=_build(RuntimeSettings, runtime_values),
        tol_scale=scale,
    )
    if scale != 1.0:
        logger.info("Comparison tolerances relaxed by factor %g", scale)
    return settings


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Get the process-wide default settings (cached)."""
    return load_settings()


def clear_settings_cache() -> None:
    """Drop cached settings. Useful for testing or after environment changes."""
    get_settings.cache_clear()
