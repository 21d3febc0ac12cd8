"""Pytest configuration and fixtures for fracmat tests."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

if TYPE_CHECKING:
    from collections.abc import Generator
    from pathlib import Path

SEED = 20240611


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="Rewrite tests/data/golden from the current bundled TaskSpec reports",
    )


@pytest.fixture
def update_golden(request: pytest.FixtureRequest) -> bool:
    """True when golden reports should be rewritten instead of compared."""
    return bool(request.config.getoption("--update-golden"))


@pytest.fixture(autouse=True)
def isolated_settings(
    tmp_path_factory: pytest.TempPathFactory, monkeypatch: pytest.MonkeyPatch
) -> Generator[None, None, None]:
    """
    Run every test against the bundled defaults.

    Points FRACMAT_CONFIG_DIR at an empty directory so a developer's own
    fracmat.yaml never leaks in, and drops the environment overrides.
    """
    from fracmat.config import clear_settings_cache
    from fracmat.paths import clear_path_cache

    monkeypatch.setenv("FRACMAT_CONFIG_DIR", str(tmp_path_factory.mktemp("no_user_config")))
    monkeypatch.delenv("FRACMAT_TOL_SCALE", raising=False)
    monkeypatch.delenv("FRACMAT_MAX_WORKERS", raising=False)
    clear_path_cache()
    clear_settings_cache()

    yield

    clear_path_cache()
    clear_settings_cache()


@pytest.fixture
def temp_config_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """
    Provide a temporary config directory for tests.

    Sets FRACMAT_CONFIG_DIR and clears the path and settings caches.
    """
    from fracmat.config import clear_settings_cache
    from fracmat.paths import clear_path_cache

    config_dir = tmp_path / "config"
    config_dir.mkdir()
    monkeypatch.setenv("FRACMAT_CONFIG_DIR", str(config_dir))
    clear_path_cache()
    clear_settings_cache()
    return config_dir


@pytest.fixture
def sample_config(temp_config_dir: Path) -> Path:
    """Create a partial fracmat.yaml in the temporary config directory."""
    config_content = """
tolerances:
  oracle_rel: 1.0e-3
linalg:
  max_dimension: 16
runtime:
  grid_points: 5
"""
    config_file = temp_config_dir / "fracmat.yaml"
    config_file.write_text(config_content)
    return config_file


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator for the randomized acceptance families."""
    return np.random.default_rng(SEED)


@pytest.fixture
def grid() -> list[float]:
    """The default evaluation grid at base point 0."""
    return [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0]


@pytest.fixture
def linear():
    """f(x) = x at base point 0."""
    from fracmat.symbolic import Expression

    return Expression.power(1.0)


@pytest.fixture
def cubic():
    """f(x) = x³ at base point 0."""
    from fracmat.symbolic import Expression

    return Expression.power(3.0)
