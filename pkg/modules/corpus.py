"""Corpus checks: recall against the interpreter, dominance over CI, sidecars.

A check runs the interpreter once per program, then every requested
analysis plus the CI baseline. Exit statuses follow the command-line
contract: 0 ok, 1 input error, 2 dominance or expectation mismatch,
3 recall violation. Independent programs run concurrently in worker
threads.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

from loguru import logger
from pydantic import ValidationError

from core.events import ALL_PATTERNS, ANALYSIS_CI
from core.pfg import AnalysisResult, result_document
from modules.analysis import (
    LoadedProgram,
    analysis_report,
    dominance_violations,
    hosts_document,
    load_program,
    load_source,
    run_analysis,
)
from modules.clients import Metrics
from modules.cutshortcut import load_container_model
from modules.cutshortcut.container_model import library_paths
from modules.interp import Budget, DynamicFacts, check_recall, explore
from modules.stress import generate
from schemas.report import ExpectedAnalysis, ExpectedResults
from schemas.run_config import StressSpec
from utils.async_utils import gather_bounded
from utils.errors import AnalysisTimeout, ContainerModelError, IRError

logger = logger.bind(module="corpus")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DOMINANCE = 2
EXIT_RECALL = 3


@dataclass
class CheckOutcome:
    name: str
    analysis: str
    status: int
    report: dict[str, Any] = field(default_factory=dict)
    message: str = ""


@dataclass(frozen=True)
class CheckOptions:
    analyses: tuple[str, ...] = ("csc",)
    patterns: frozenset[str] = frozenset(ALL_PATTERNS)
    entry: str = "Main.main"
    model_path: Path | None = None
    budget: Budget = Budget()
    max_seconds: float | None = None


def expected_path(path: Path) -> Path:
    return path.with_name(path.stem + ".expected.json")


def load_expected(path: Path) -> ExpectedResults | None:
    """Read the sidecar next to ``path``; ``None`` when there is none.

    Raises:
        IRError: If the sidecar is not valid JSON or has the wrong shape.
    """

    sidecar = expected_path(path)
    if not sidecar.exists():
        return None
    try:
        return ExpectedResults.model_validate(json.loads(sidecar.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, ValidationError) as exc:
        raise IRError(f"{sidecar}: invalid expected-results file: {exc}") from exc


def expectation_mismatches(
    expected: ExpectedAnalysis, result: AnalysisResult, metrics: Metrics
) -> list[str]:
    doc = result_document(result)
    hosts = hosts_document(result)
    out: list[str] = []
    for ptr, objs in sorted(expected.pt.items()):
        got = doc["pt"].get(ptr, [])
        if sorted(objs) != got:
            out.append(f"expected pt {ptr} = {sorted(objs)}, got {got}")
    for ptr, objs in sorted(expected.hosts.items()):
        got = hosts.get(ptr, [])
        if sorted(objs) != got:
            out.append(f"expected ptH {ptr} = {sorted(objs)}, got {got}")
    values = metrics.as_dict()
    for name, value in sorted(expected.metrics.items()):
        if values.get(name) != value:
            out.append(f"expected {name} = {value}, got {values.get(name)}")
    return out


def check_analysis(
    loaded: LoadedProgram,
    analysis: str,
    facts: DynamicFacts,
    baseline: AnalysisResult,
    options: CheckOptions,
    expected: ExpectedResults | None = None,
) -> CheckOutcome:
    """Check one analysis of ``loaded`` against the oracle and the baseline."""
    name = str(loaded.path)
    try:
        result = run_analysis(
            loaded.program,
            analysis,
            patterns=options.patterns,
            model=loaded.model,
            max_seconds=options.max_seconds,
        )
    except AnalysisTimeout as exc:
        logger.warning("Skipped after timeout", program=name, analysis=analysis)
        return CheckOutcome(name, analysis, EXIT_OK, {"skipped": str(exc)}, str(exc))

    doc, metrics = analysis_report(loaded.program, result)
    recall = check_recall(facts, result)
    dominance = dominance_violations(result, baseline)
    wanted = expected.for_analysis(analysis) if expected else None
    mismatches = expectation_mismatches(wanted, result, metrics) if wanted else []

    if recall.violations:
        status, message = EXIT_RECALL, f"recall violation: {recall.violations[0]}"
    elif dominance:
        status, message = EXIT_DOMINANCE, f"dominance violation: {dominance[0]}"
    elif mismatches:
        status, message = EXIT_DOMINANCE, mismatches[0]
    else:
        status, message = EXIT_OK, "ok"
    report = {
        "program": name,
        "analysis": analysis,
        "status": status,
        "result": doc,
        "recall": {
            "facts": recall.facts,
            "recall": round(recall.recall, 6),
            "violations": list(recall.violations),
        },
        "dominance": {"violations": dominance},
        "expected": {"mismatches": mismatches},
        "interp": {
            "exhausted": facts.exhausted,
            "paths": facts.paths,
            "nullDerefs": facts.null_derefs,
        },
    }
    logger.info("Checked", program=name, analysis=analysis, status=status)
    return CheckOutcome(name, analysis, status, report, message)


def check_loaded(
    loaded: LoadedProgram,
    options: CheckOptions,
    expected: ExpectedResults | None = None,
) -> list[CheckOutcome]:
    facts = explore(loaded.program, options.budget)
    baseline = run_analysis(loaded.program, ANALYSIS_CI)
    return [
        check_analysis(loaded, analysis, facts, baseline, options, expected)
        for analysis in options.analyses
    ]


def _input_failure(name: str, options: CheckOptions, exc: Exception) -> list[CheckOutcome]:
    logger.warning("Input error", program=name, error=str(exc))
    return [CheckOutcome(name, a, EXIT_INPUT, {}, str(exc)) for a in options.analyses]


def check_path(path: Path, options: CheckOptions) -> list[CheckOutcome]:
    """Check every requested analysis on the program at ``path``."""
    try:
        loaded = load_program(path, entry=options.entry, model_path=options.model_path)
        expected = load_expected(path)
    except (IRError, ContainerModelError) as exc:
        return _input_failure(str(path), options, exc)
    return check_loaded(loaded, options, expected)


def check_spec(spec: StressSpec, options: CheckOptions) -> list[CheckOutcome]:
    """Check a generated stress program."""
    name = f"gen:seed={spec.seed}"
    try:
        loaded = load_source(
            generate(spec), path=Path(name), entry=options.entry, model_path=options.model_path
        )
    except (IRError, ContainerModelError) as exc:
        return _input_failure(name, options, exc)
    return check_loaded(loaded, options)


def corpus_files(root: Path, model_path: Path | None = None) -> list[Path]:
    """Programs under ``root``, skipping the container model's own library files."""
    if root.is_file():
        return [root]
    skip: set[Path] = set()
    if model_path is not None and model_path.exists():
        try:
            model = load_container_model(model_path.read_text(encoding="utf-8"))
            skip = set(library_paths(model, model_path))
        except ContainerModelError:
            pass
    return sorted(p for p in root.rglob("*.ir") if p.resolve() not in skip)


def load_seeds(path: Path) -> list[StressSpec]:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        return [StressSpec.model_validate(item) for item in data]
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise IRError(f"{path}: invalid seed list: {exc}") from exc


async def check_corpus(
    paths: Sequence[Path],
    options: CheckOptions,
    *,
    specs: Iterable[StressSpec] = (),
    workers: int = 4,
) -> list[CheckOutcome]:
    """Check programs and generated specs concurrently, keeping input order."""
    jobs = [lambda p=p: asyncio.to_thread(check_path, p, options) for p in paths]
    jobs += [lambda s=s: asyncio.to_thread(check_spec, s, options) for s in specs]
    results = await gather_bounded(workers, jobs)
    return [outcome for group in results for outcome in group]


def exit_status(outcomes: Iterable[CheckOutcome]) -> int:
    return max((o.status for o in outcomes), default=EXIT_OK)


__all__ = [
    "EXIT_OK",
    "EXIT_INPUT",
    "EXIT_DOMINANCE",
    "EXIT_RECALL",
    "CheckOutcome",
    "CheckOptions",
    "expected_path",
    "load_expected",
    "expectation_mismatches",
    "check_analysis",
    "check_loaded",
    "check_path",
    "check_spec",
    "corpus_files",
    "load_seeds",
    "check_corpus",
    "exit_status",
]
