"""
Path resolution for fracmat configuration files.

Uses platformdirs for XDG-style defaults with an environment override:
- FRACMAT_CONFIG_DIR: Override the config directory holding fracmat.yaml
"""

from __future__ import annotations

import os
from functools import lru_cache
from pathlib import Path

import platformdirs

from fracmat.logging_config import get_logger

APP_NAME = "fracmat"
APP_AUTHOR = "fracmat"
USER_CONFIG_FILENAME = "fracmat.yaml"

logger = get_logger(__name__)


class PathSecurityError(ValueError):
    """Raised when a path fails validation."""


def _validate_path(path_str: str, env_var_name: str) -> Path:
    """
    Validate and normalize a path taken from an environment variable.

    Suspicious fragments (``..``, ``~``, ``$``) are logged, the path is
    expanded and resolved, and the result must be absolute.

    Args:
        path_str: Raw path string from environment variable
        env_var_name: Name of the env var (for logging)

    Returns:
        Resolved absolute Path

    Raises:
        PathSecurityError: If the path does not resolve to an absolute path
    """
    for pattern in ("..", "~", "$"):
        if pattern in path_str:
            logger.warning(
                "Path from %s contains '%s' pattern: %s. Path will be normalized.",
                env_var_name,
                pattern,
                path_str,
            )

    resolved = Path(path_str).expanduser().resolve()

    if not resolved.is_absolute():
        raise PathSecurityError(
            f"Path from {env_var_name} did not resolve to absolute path: {path_str}"
        )

    return resolved


@lru_cache(maxsize=1)
def get_config_dir() -> Path:
    """
    Get the directory searched for the user's fracmat.yaml.

    Resolution order:
    1. FRACMAT_CONFIG_DIR environment variable (if set)
    2. platformdirs.user_config_dir()

    The directory is not created; a missing directory simply means no user
    overrides exist.

    Raises:
        PathSecurityError: If FRACMAT_CONFIG_DIR fails validation
    """
    env_dir = os.environ.get("FRACMAT_CONFIG_DIR")
    if env_dir:
        return _validate_path(env_dir, "FRACMAT_CONFIG_DIR")
    return Path(platformdirs.user_config_dir(APP_NAME, APP_AUTHOR))


def get_user_config_path() -> Path:
    """Get the path of the user's tolerance overrides file."""
    return get_config_dir() / USER_CONFIG_FILENAME


def clear_path_cache() -> None:
    """Clear cached paths. Useful for testing or after environment changes."""
    get_config_dir.cache_clear()
