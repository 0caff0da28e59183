"""``check``: analysis plus recall, dominance and expected-results checks."""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
import time
from pathlib import Path

from loguru import logger

from modules.corpus import (
    CheckOptions,
    CheckOutcome,
    check_corpus,
    corpus_files,
    exit_status,
    load_seeds,
)
from modules.interp import Budget
from routers.common import (
    add_analysis_flags,
    add_budget_flags,
    dumps,
    emit,
    load_settings,
    run_config,
)
from utils.errors import IRError, error_payload

logger = logger.bind(module="cli")

_CODES = {1: "input_error", 2: "dominance_violation", 3: "recall_violation"}


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "check",
        parents=parents,
        help="check analyses against the interpreter and the CI baseline",
    )
    parser.add_argument("input", type=Path, help="IR program or corpus directory")
    parser.add_argument(
        "--analysis",
        action="append",
        help="analysis to check; repeat for several (default from config)",
    )
    parser.add_argument("--seeds", type=Path, help="also check generated programs from a seed list")
    parser.add_argument("--report", type=Path, help="write the combined report here")
    parser.add_argument("--workers", type=int, help="programs checked concurrently")
    add_analysis_flags(parser)
    add_budget_flags(parser)
    parser.set_defaults(handler=run)


def outcome_document(outcome: CheckOutcome) -> dict:
    return {
        **outcome.report,
        "program": outcome.name,
        "analysis": outcome.analysis,
        "status": outcome.status,
        "message": outcome.message,
    }


def _report_failures(outcomes: list[CheckOutcome]) -> None:
    for outcome in outcomes:
        if outcome.status == 0:
            continue
        payload = error_payload(
            _CODES[outcome.status],
            outcome.message,
            details={"program": outcome.name, "analysis": outcome.analysis},
        )
        sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def run(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    settings = load_settings(args)
    analyses = args.analysis or [settings["analysis"]]
    configs = [run_config(args, settings, analysis=a) for a in analyses]
    cfg = configs[0]
    if not cfg.input.exists():
        raise IRError(f"cannot read {cfg.input}: no such file or directory")

    options = CheckOptions(
        analyses=tuple(c.analysis for c in configs),
        patterns=frozenset(cfg.patterns),
        entry=cfg.entry,
        model_path=cfg.container_model,
        budget=Budget(max_steps=cfg.max_steps, max_paths=cfg.max_paths),
        max_seconds=cfg.time_budget_secs,
    )
    paths = corpus_files(cfg.input, cfg.container_model)
    specs = load_seeds(args.seeds) if args.seeds else []
    workers = args.workers or settings["workers"]
    outcomes = asyncio.run(check_corpus(paths, options, specs=specs, workers=workers))

    status = exit_status(outcomes)
    emit(
        dumps({"status": status, "runs": [outcome_document(o) for o in outcomes]}),
        cfg.report,
    )
    _report_failures(outcomes)
    logger.info(
        "check finished",
        input=str(cfg.input),
        programs=len(paths) + len(specs),
        status=status,
        elapsed=round(time.perf_counter() - start, 3),
    )
    return status
