"""``interp``: run the bounded interpreter and print the observed facts."""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from loguru import logger

from config import THRESHOLDS
from modules.analysis import load_program
from modules.interp import Budget, explore, serialize_facts
from routers.common import add_budget_flags, emit, load_settings, model_path

logger = logger.bind(module="cli")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "interp", parents=parents, help="explore a program and print dynamic facts"
    )
    parser.add_argument("input", type=Path, help="IR program")
    parser.add_argument("--report", type=Path, help="write the facts here")
    add_budget_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    settings = load_settings(args)
    budget = Budget(
        max_steps=args.max_steps or THRESHOLDS.max_steps,
        max_paths=args.max_paths or THRESHOLDS.max_paths,
    )
    loaded = load_program(
        args.input,
        entry=args.entry or settings["entry"],
        model_path=model_path(args, settings),
    )
    facts = explore(loaded.program, budget)
    emit(serialize_facts(facts) + "\n", args.report)
    if facts.exhausted:
        logger.warning("Exploration hit its budget", input=str(args.input), paths=facts.paths)
    logger.info(
        "interp finished",
        input=str(args.input),
        elapsed=round(time.perf_counter() - start, 3),
    )
    return 0
