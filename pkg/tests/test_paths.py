"""Tests for the paths module."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import pytest

from fracmat.logging_config import reset_logging
from fracmat.paths import (
    APP_AUTHOR,
    APP_NAME,
    USER_CONFIG_FILENAME,
    clear_path_cache,
    get_config_dir,
    get_user_config_path,
)

if TYPE_CHECKING:
    from pathlib import Path


class TestGetConfigDir:
    """Tests for get_config_dir function."""

    def test_uses_env_var_when_set(self, temp_config_dir: Path) -> None:
        assert get_config_dir() == temp_config_dir.resolve()

    def test_does_not_create_directory(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        target = tmp_path / "not_there"
        monkeypatch.setenv("FRACMAT_CONFIG_DIR", str(target))
        clear_path_cache()

        assert get_config_dir() == target.resolve()
        assert not target.exists()

    def test_falls_back_to_platformdirs(self, monkeypatch: pytest.MonkeyPatch) -> None:
        import platformdirs

        monkeypatch.delenv("FRACMAT_CONFIG_DIR", raising=False)
        clear_path_cache()

        assert str(get_config_dir()) == platformdirs.user_config_dir(APP_NAME, APP_AUTHOR)

    def test_result_is_cached(
        self, temp_config_dir: Path, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        first = get_config_dir()
        monkeypatch.setenv("FRACMAT_CONFIG_DIR", str(tmp_path / "elsewhere"))
        assert get_config_dir() == first

        clear_path_cache()
        assert get_config_dir() == (tmp_path / "elsewhere").resolve()


class TestPathValidation:
    """Tests for path validation of FRACMAT_CONFIG_DIR."""

    def test_logs_warning_for_traversal_pattern(
        self,
        tmp_path: Path,
        monkeypatch: pytest.MonkeyPatch,
        caplog: pytest.LogCaptureFixture,
    ) -> None:
        reset_logging()
        monkeypatch.setenv("FRACMAT_CONFIG_DIR", str(tmp_path / "foo" / ".." / "custom"))
        clear_path_cache()

        with caplog.at_level(logging.WARNING, logger="fracmat.paths"):
            result = get_config_dir()

        assert any("'..'" in record.getMessage() for record in caplog.records)
        assert result == (tmp_path / "custom").resolve()
        assert ".." not in str(result)

    def test_expands_user_home(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setenv("HOME", str(tmp_path))
        monkeypatch.setenv("USERPROFILE", str(tmp_path))
        monkeypatch.setenv("FRACMAT_CONFIG_DIR", "~/fracmat_config")
        clear_path_cache()

        result = get_config_dir()

        assert result.is_absolute()
        assert "~" not in str(result)
        assert result.name == "fracmat_config"


class TestGetUserConfigPath:
    """Tests for get_user_config_path function."""

    def test_returns_fracmat_yaml_path(self, temp_config_dir: Path) -> None:
        result = get_user_config_path()

        assert result.name == USER_CONFIG_FILENAME
        assert result.parent == temp_config_dir.resolve()
