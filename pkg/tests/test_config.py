"""Tests for the settings loader."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from fracmat.config import Settings, Tolerances, clear_settings_cache, get_settings, load_settings

if TYPE_CHECKING:
    from pathlib import Path


class TestLoadSettings:
    """Tests for load_settings function."""

    def test_bundled_defaults(self) -> None:
        """Should load the bundled tolerances when no user file exists."""
        settings = load_settings()

        assert settings.tolerances == Tolerances()
        assert settings.tolerances.oracle_rel == 1e-4
        assert settings.gaps.noncommuting == 1e-3
        assert settings.symbolic.max_log_power == 3
        assert settings.linalg.max_dimension == 32
        assert settings.oracle.steps == 16384
        assert settings.runtime.grid_points == 7
        assert settings.tol_scale == 1.0

    def test_layers_user_file(self, sample_config: Path) -> None:
        """Should layer a partial user file over the defaults."""
        settings = load_settings()

        assert settings.tolerances.oracle_rel == 1e-3
        assert settings.tolerances.inverse_pair == 1e-8
        assert settings.linalg.max_dimension == 16
        assert settings.linalg.max_jordan_dimension == 8
        assert settings.runtime.grid_points == 5

    def test_loads_from_explicit_path(self, tmp_path: Path) -> None:
        config_file = tmp_path / "custom.yaml"
        config_file.write_text("oracle:\n  steps: 2048\n")

        assert load_settings(config_file).oracle.steps == 2048

    def test_raises_on_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError):
            load_settings(tmp_path / "nonexistent.yaml")

    def test_empty_file_means_defaults(self, temp_config_dir: Path) -> None:
        (temp_config_dir / "fracmat.yaml").write_text("")
        assert load_settings() == Settings()

    @pytest.mark.parametrize(
        ("content", "message"),
        [
            ("- 1\n- 2\n", "is not a YAML mapping"),
            ("plotting:\n  dpi: 100\n", "Unknown config section"),
            ("tolerances: 3\n", "Config section 'tolerances' must be a mapping"),
            ("tolerances:\n  typo_rel: 1.0\n", "Unknown key 'tolerances.typo_rel'"),
            ("tolerances:\n  oracle_rel: tight\n", "must be a number"),
            ("tolerances:\n  oracle_rel: true\n", "must be a number"),
            ("oracle:\n  steps: 10.5\n", "must be an integer"),
            ("gaps:\n  witness: -0.1\n", "must be non-negative"),
        ],
    )
    def test_rejects_invalid_content(
        self, temp_config_dir: Path, content: str, message: str
    ) -> None:
        (temp_config_dir / "fracmat.yaml").write_text(content)
        with pytest.raises(ValueError, match=message):
            load_settings()

    def test_integer_valued_float_accepted(self, temp_config_dir: Path) -> None:
        (temp_config_dir / "fracmat.yaml").write_text("oracle:\n  steps: 1024.0\n")
        steps = load_settings().oracle.steps
        assert steps == 1024
        assert isinstance(steps, int)


class TestEnvironmentOverrides:
    """Tests for FRACMAT_TOL_SCALE and FRACMAT_MAX_WORKERS."""

    def test_tol_scale_multiplies_tolerances(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("FRACMAT_TOL_SCALE", "10")
        settings = load_settings()

        assert settings.tol_scale == 10.0
        assert settings.tolerances.oracle_rel == pytest.approx(1e-3)
        assert settings.tolerances.symbolic_rel == pytest.approx(1e-11)

    def test_tol_scale_leaves_structural_thresholds(
        self, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setenv("FRACMAT_TOL_SCALE", "100")
        settings = load_settings()

        assert settings.gaps.noncommuting == 1e-3
        assert settings.symbolic.key_tol == 1e-12
        assert settings.linalg.cluster_tol == 1e-8

    @pytest.mark.parametrize(("raw", "message"), [("0.5", "must be >= 1"), ("loose", "real number")])
    def test_rejects_bad_tol_scale(
        self, monkeypatch: pytest.MonkeyPatch, raw: str, message: str
    ) -> None:
        monkeypatch.setenv("FRACMAT_TOL_SCALE", raw)
        with pytest.raises(ValueError, match=message):
            load_settings()

    def test_max_workers(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("FRACMAT_MAX_WORKERS", "2")
        assert load_settings().runtime.max_workers == 2

    def test_max_workers_floor(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("FRACMAT_MAX_WORKERS", "0")
        assert load_settings().runtime.max_workers == 1

    def test_rejects_bad_max_workers(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("FRACMAT_MAX_WORKERS", "many")
        with pytest.raises(ValueError, match="must be an integer"):
            load_settings()


class TestSettingsHelpers:
    """Tests for derived settings and the cache."""

    def test_scaled(self) -> None:
        scaled = Tolerances().scaled(2.0)
        assert scaled.inverse_pair == pytest.approx(2e-8)
        assert scaled.projector == pytest.approx(2e-10)

    def test_tolerance_overrides_are_not_rescaled(
        self, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setenv("FRACMAT_TOL_SCALE", "10")
        settings = load_settings().with_tolerance_overrides({"oracle_rel": 1e-6})

        assert settings.tolerances.oracle_rel == 1e-6
        assert settings.tolerances.inverse_pair == pytest.approx(1e-7)

    def test_tolerance_overrides_validated(self) -> None:
        with pytest.raises(ValueError, match="Unknown key 'tolerances.gap'"):
            Settings().with_tolerance_overrides({"gap": 1.0})

    def test_get_settings_is_cached(self, temp_config_dir: Path) -> None:
        first = get_settings()
        assert get_settings() is first

        (temp_config_dir / "fracmat.yaml").write_text("oracle:\n  steps: 512\n")
        assert get_settings().oracle.steps == 16384

        clear_settings_cache()
        assert get_settings().oracle.steps == 512
