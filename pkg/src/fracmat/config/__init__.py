"""Configuration module for fracmat."""

from __future__ import annotations

from fracmat.config.settings import (
    Gaps,
    LinalgSettings,
    OracleSettings,
    RuntimeSettings,
    Settings,
    SymbolicSettings,
    Tolerances,
    clear_settings_cache,
    get_settings,
    load_settings,
)

__all__ = [
    "Gaps",
    "LinalgSettings",
    "OracleSettings",
    "RuntimeSettings",
    "Settings",
    "SymbolicSettings",
    "Tolerances",
    "clear_settings_cache",
    "get_settings",
    "load_settings",
]
