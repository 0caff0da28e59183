"""``gen``: write a deterministic stress program."""

from __future__ import annotations

import argparse
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from modules.stress import generate
from routers.common import emit, load_settings
from schemas.run_config import StressSpec
from utils.errors import ConfigError

logger = logger.bind(module="cli")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser("gen", parents=parents, help="generate a stress program")
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--containers", type=int, default=1, help="container units")
    parser.add_argument("--field-wrappers", type=int, default=0, help="setter/getter units")
    parser.add_argument("--local-flows", type=int, default=0, help="local-flow units")
    parser.add_argument("--depth", type=int, default=1, help="nested setter depth")
    parser.add_argument("--out", type=Path, help="write here instead of stdout")
    parser.set_defaults(handler=run)


def stress_spec(args: argparse.Namespace) -> StressSpec:
    try:
        return StressSpec(
            seed=args.seed,
            n_containers=args.containers,
            n_field_wrappers=args.field_wrappers,
            n_local_flows=args.local_flows,
            depth=args.depth,
        )
    except ValidationError as exc:
        errors = "; ".join(e["msg"] for e in exc.errors())
        raise ConfigError(f"invalid generator options: {errors}") from exc


def run(args: argparse.Namespace) -> int:
    load_settings(args)
    spec = stress_spec(args)
    emit(generate(spec), args.out)
    logger.info("gen finished", seed=spec.seed)
    return 0
