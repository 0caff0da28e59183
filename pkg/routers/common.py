"""Flags shared by every command and their resolution against config.json."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Iterable

from loguru import logger
from pydantic import ValidationError

from config import THRESHOLDS, set_config
from core.config import load_config
from core.events import PATTERN_FIELD, PATTERN_FIELD_STORE
from logging_config import set_log_level
from schemas.run_config import RunConfig
from utils.errors import ConfigError

logger = logger.bind(module="cli")


def common_parser() -> argparse.ArgumentParser:
    """Parent parser carrying the global flags."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--config", type=Path, help="configuration file (default config.json)")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--stdlib", type=Path, help="bundled container model to link")
    parser.add_argument("--no-stdlib", action="store_true", help="do not link a container library")
    parser.add_argument(
        "--container-model", type=Path, help="container model overriding the bundled one"
    )
    parser.add_argument("--entry", help="entry method (default Main.main)")
    return parser


def add_analysis_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--patterns",
        help="comma-separated cut-shortcut patterns: field,container,local",
    )
    parser.add_argument(
        "--no-field-load",
        action="store_true",
        help="keep the store half of the field pattern only",
    )
    parser.add_argument("--time-budget", type=float, help="seconds per context-sensitive run")


def add_budget_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-steps", type=int, help="interpreter steps per path")
    parser.add_argument("--max-paths", type=int, help="interpreter paths per program")


def load_settings(args: argparse.Namespace) -> dict[str, Any]:
    """Load the config file, apply it process-wide and honour ``--verbose``."""
    if getattr(args, "verbose", False):
        set_log_level("DEBUG")
    settings = load_config(args.config)
    set_config(settings)
    return settings


def model_path(args: argparse.Namespace, settings: dict[str, Any]) -> Path | None:
    """Explicit model, else the configured one, else the bundled stdlib."""
    if args.container_model:
        return args.container_model
    if settings.get("container_model"):
        return Path(settings["container_model"])
    if args.no_stdlib:
        return None
    stdlib = args.stdlib or settings.get("stdlib")
    return Path(stdlib) if stdlib else None


def split_patterns(text: str | None, default: Iterable[str]) -> list[str]:
    if text is None:
        return sorted(default)
    return sorted({p.strip() for p in text.split(",") if p.strip()})


def selected_patterns(args: argparse.Namespace, settings: dict[str, Any]) -> list[str]:
    patterns = split_patterns(getattr(args, "patterns", None), settings["patterns"])
    if getattr(args, "no_field_load", False) and PATTERN_FIELD in patterns:
        patterns = sorted((set(patterns) - {PATTERN_FIELD}) | {PATTERN_FIELD_STORE})
    return patterns


def run_config(
    args: argparse.Namespace,
    settings: dict[str, Any],
    *,
    analysis: str | None = None,
    input_path: Path | None = None,
) -> RunConfig:
    """Merge flags over the configuration and validate them.

    Raises:
        ConfigError: If any merged value is invalid.
    """

    data = {
        "input": input_path if input_path is not None else args.input,
        "analysis": analysis or getattr(args, "analysis", None) or settings["analysis"],
        "patterns": selected_patterns(args, settings),
        "container_model": model_path(args, settings),
        "entry": args.entry or settings["entry"],
        "max_steps": getattr(args, "max_steps", None) or THRESHOLDS.max_steps,
        "max_paths": getattr(args, "max_paths", None) or THRESHOLDS.max_paths,
        "time_budget_secs": getattr(args, "time_budget", None) or THRESHOLDS.time_budget_secs,
        "report": getattr(args, "report", None),
        "dot": getattr(args, "dot", None),
    }
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        errors = "; ".join(e["msg"] for e in exc.errors())
        raise ConfigError(f"invalid options: {errors}") from exc


def emit(text: str, path: Path | None = None) -> None:
    """Write ``text`` to ``path`` or stdout, always UTF-8."""
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Wrote output", path=str(path))


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


__all__ = [
    "common_parser",
    "add_analysis_flags",
    "add_budget_flags",
    "load_settings",
    "model_path",
    "split_patterns",
    "selected_patterns",
    "run_config",
    "emit",
    "dumps",
]
