"""Command-line entry point routing sub-commands to ``routers``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from loguru import logger

# allow imports relative to this directory without installing the package
if str(Path(__file__).resolve().parent) not in sys.path:
    sys.path.insert(0, str(Path(__file__).resolve().parent))

import logging_config  # noqa: F401,E402
from routers import analyze, check, compare, gen, interp  # noqa: E402
from routers.common import common_parser  # noqa: E402
from utils.errors import (  # noqa: E402
    AnalysisTimeout,
    ConfigError,
    ContainerModelError,
    IRError,
    error_payload,
)

logger = logger.bind(module="app")

EXIT_INPUT = 1

_COMMANDS = (analyze, interp, check, compare, gen)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cutshortcut",
        description="Pointer analysis with cut-shortcut precision patterns.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    parents = [common_parser()]
    for command in _COMMANDS:
        command.register(subparsers, parents)
    return parser


def _fail(code: str, exc: Exception) -> int:
    sys.stderr.write(json.dumps(error_payload(code, str(exc)), sort_keys=True) + "\n")
    return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    """Run one command and return its exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are input errors here
        return 0 if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.handler(args)
    except ConfigError as exc:
        return _fail("config_error", exc)
    except ContainerModelError as exc:
        return _fail("container_model_error", exc)
    except IRError as exc:
        return _fail("input_error", exc)
    except AnalysisTimeout as exc:
        return _fail("timeout", exc)
    except ValueError as exc:
        return _fail("invalid_value", exc)


if __name__ == "__main__":
    sys.exit(main())
