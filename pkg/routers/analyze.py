"""``analyze``: run one analysis and write its report."""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from loguru import logger

from modules.analysis import analysis_report, load_program, run_analysis
from modules.export import export_dot
from modules.profiler import profile_run
from routers.common import (
    add_analysis_flags,
    dumps,
    emit,
    load_settings,
    run_config,
)

logger = logger.bind(module="cli")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "analyze", parents=parents, help="run an analysis and print its report"
    )
    parser.add_argument("input", type=Path, help="IR program")
    parser.add_argument("--analysis", help="ci, csc, kcfa:K or kobj:K")
    parser.add_argument("--report", type=Path, help="write the JSON report here")
    parser.add_argument("--dot", type=Path, help="write the PFG as DOT here")
    add_analysis_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    """Analyze ``args.input``; report to ``--report`` or stdout.

    Raises:
        IRError: On unreadable or ill-formed input.
        ConfigError: On invalid options.
        AnalysisTimeout: When a context-sensitive run exceeds its budget.
    """

    start = time.perf_counter()
    settings = load_settings(args)
    cfg = run_config(args, settings)
    loaded = load_program(cfg.input, entry=cfg.entry, model_path=cfg.container_model)
    with profile_run(cfg.analysis):
        result = run_analysis(
            loaded.program,
            cfg.analysis,
            patterns=cfg.patterns,
            model=loaded.model,
            max_seconds=cfg.time_budget_secs,
        )
    doc, _ = analysis_report(loaded.program, result)
    emit(dumps(doc), cfg.report)
    if cfg.dot is not None:
        emit(export_dot(result, name=cfg.input.stem), cfg.dot)
    logger.info(
        "analyze finished",
        input=str(cfg.input),
        analysis=cfg.analysis,
        elapsed=round(time.perf_counter() - start, 3),
    )
    return 0
