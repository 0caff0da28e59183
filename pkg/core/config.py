"""Configuration loading utilities.

``load_config`` reads ``config.json``, fills in :data:`CONFIG_DEFAULTS`,
applies ``CSC_*`` environment overrides, resolves relative paths against
the directory holding the file and validates the result.
"""

from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Optional

from loguru import logger
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from config import DEFAULT_CONFIG
from schemas.run_config import ConfigFile
from utils.errors import ConfigError

logger = logger.bind(module="config")

ROOT_DIR = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG_PATH = ROOT_DIR / "config.json"

# Default configuration values for :func:`load_config`.
CONFIG_DEFAULTS = copy.deepcopy(DEFAULT_CONFIG)

# Keys holding filesystem paths
_PATH_KEYS = ("stdlib", "container_model")


class EnvSettings(BaseSettings):
    """Environment overrides, e.g. ``CSC_MAX_STEPS=500``."""

    model_config = SettingsConfigDict(env_prefix="CSC_")

    config_path: Optional[Path] = None
    max_steps: Optional[int] = None
    max_paths: Optional[int] = None
    workers: Optional[int] = None


__all__ = [
    "CONFIG_DEFAULTS",
    "DEFAULT_CONFIG_PATH",
    "EnvSettings",
    "config_path",
    "load_config",
]


# Internal helpers --------------------------------------------------------


def _read_config_file(path: Path) -> dict:
    """Read a JSON configuration file from ``path``."""

    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with path.open(encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return data


def _apply_defaults(data: dict) -> dict:
    """Populate missing configuration keys."""

    for key, value in CONFIG_DEFAULTS.items():
        if isinstance(value, (dict, list)):
            data.setdefault(key, copy.deepcopy(value))
        else:
            data.setdefault(key, value)
    return data


def _apply_env(data: dict, env: EnvSettings) -> dict:
    for key in ("max_steps", "max_paths", "workers"):
        value = getattr(env, key)
        if value is not None:
            data[key] = value
    return data


def _resolve_paths(data: dict, base: Path) -> dict:
    for key in _PATH_KEYS:
        value = data.get(key)
        if value and not Path(value).is_absolute():
            data[key] = str((base / value).resolve())
    return data


# config_path routine
def config_path(explicit: str | Path | None = None) -> Path:
    """Pick the config file: explicit argument, then ``CSC_CONFIG_PATH``, then the default."""
    if explicit:
        return Path(explicit)
    env = EnvSettings()
    return env.config_path or DEFAULT_CONFIG_PATH


# load_config routine
def load_config(path: str | Path | None = None, *, data: dict | None = None) -> dict:
    """Load configuration from ``path``.

    When ``data`` is provided, it is used instead of reading from ``path``;
    relative paths are then resolved against the repository root.

    Raises:
        ConfigError: If the file is missing, malformed or fails validation.
    """

    if data is None:
        file_path = config_path(path)
        data = _read_config_file(file_path)
        base = file_path.resolve().parent
    else:
        data = copy.deepcopy(data)
        base = ROOT_DIR
    data = _apply_defaults(data)
    data = _apply_env(data, EnvSettings())
    data = _resolve_paths(data, base)
    try:
        ConfigFile.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    logger.debug("Loaded configuration", keys=sorted(data), pid=os.getpid())
    return data
