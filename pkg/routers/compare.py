"""``compare``: client metrics of several analyses side by side."""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from loguru import logger

from core.events import ANALYSIS_CI, ANALYSIS_CSC, PATTERN_CONTAINER
from core.pfg import involved_methods
from modules.analysis import LoadedProgram, load_program, run_analysis
from modules.clients import (
    Metrics,
    attribution,
    compare_metrics,
    compute_metrics,
    render_attribution,
    render_table,
    table_rows,
)
from modules.export import export_csv, export_excel
from modules.profiler import ProfilerState, profile_run
from routers.common import add_analysis_flags, emit, load_settings, run_config
from schemas.run_config import RunConfig
from utils.errors import AnalysisTimeout

logger = logger.bind(module="cli")


def register(subparsers, parents: list[argparse.ArgumentParser]) -> None:
    parser = subparsers.add_parser(
        "compare", parents=parents, help="tabulate client metrics across analyses"
    )
    parser.add_argument("input", type=Path, help="IR program")
    parser.add_argument(
        "--analysis",
        action="append",
        help="analysis row; repeat for several (default from config)",
    )
    parser.add_argument("--csv", type=Path, help="also write the table as CSV")
    parser.add_argument("--xlsx", type=Path, help="also write the table as XLSX")
    parser.add_argument(
        "--attribution",
        action="store_true",
        help="add the per-pattern share of the CSC improvement",
    )
    parser.add_argument("--timings", action="store_true", help="add seconds and RSS columns")
    parser.add_argument("--report", type=Path, help="write the table here")
    add_analysis_flags(parser)
    parser.set_defaults(handler=run)


def _metrics(
    loaded: LoadedProgram,
    cfg: RunConfig,
    patterns: list[str],
    state: ProfilerState,
    tag: str,
    involved: dict[str, int] | None = None,
) -> Metrics:
    with profile_run(tag, state):
        result = run_analysis(
            loaded.program,
            cfg.analysis,
            patterns=patterns,
            model=loaded.model,
            max_seconds=cfg.time_budget_secs,
        )
    if involved is not None and (result.cut_log or result.shortcuts):
        owners = {site.label: site.method for site in loaded.program.alloc_sites()}
        involved[tag] = len(involved_methods(result, owners))
    return compute_metrics(loaded.program, result)


def _attribution(
    loaded: LoadedProgram, base: RunConfig, rows: dict[str, Metrics], state: ProfilerState
) -> str:
    csc = base.model_copy(update={"analysis": ANALYSIS_CSC})
    ci = rows.get(ANALYSIS_CI)
    if ci is None:
        ci_cfg = csc.model_copy(update={"analysis": ANALYSIS_CI})
        ci = _metrics(loaded, ci_cfg, [], state, ANALYSIS_CI)
    full = rows.get(ANALYSIS_CSC) or _metrics(loaded, csc, csc.patterns, state, "csc")
    singles = {}
    for pattern in csc.patterns:
        if pattern == PATTERN_CONTAINER and loaded.model is None:
            continue
        singles[pattern] = _metrics(loaded, csc, [pattern], state, f"csc[{pattern}]")
    return render_attribution(attribution(ci, singles, full))


def run(args: argparse.Namespace) -> int:
    start = time.perf_counter()
    settings = load_settings(args)
    analyses = args.analysis or settings["compare_analyses"]
    configs = [run_config(args, settings, analysis=a) for a in analyses]
    base = configs[0]
    loaded = load_program(base.input, entry=base.entry, model_path=base.container_model)

    state = ProfilerState()
    rows: dict[str, Metrics] = {}
    skipped: list[str] = []
    involved: dict[str, int] = {}
    for cfg in configs:
        try:
            rows[cfg.analysis] = _metrics(
                loaded, cfg, cfg.patterns, state, cfg.analysis, involved
            )
        except AnalysisTimeout as exc:
            logger.warning("Skipped after timeout", analysis=cfg.analysis, error=str(exc))
            skipped.append(cfg.analysis)

    comparison = compare_metrics(list(rows.items()))
    extra = {name: state.columns(name) for name in rows} if args.timings else None
    text = render_table(comparison, extra)
    for name, count in involved.items():
        text += f"{name}: {count} methods involved in cuts or shortcuts\n"
    for name in skipped:
        text += f"{name}: skipped after exceeding the time budget\n"
    if args.attribution:
        text += "\n" + _attribution(loaded, base, rows, state)
    emit(text, args.report)

    header, body = table_rows(comparison, extra)
    if args.csv:
        export_csv(header, body, args.csv)
    if args.xlsx:
        export_excel(header, body, args.xlsx)
    logger.info(
        "compare finished",
        input=str(base.input),
        analyses=list(rows),
        elapsed=round(time.perf_counter() - start, 3),
    )
    return 0
