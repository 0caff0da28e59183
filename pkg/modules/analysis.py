"""Load programs with their container library and run a selected analysis."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable

from loguru import logger

from core.checker import Diagnostic, check_program
from core.events import (
    ALL_PATTERNS,
    ANALYSIS_CI,
    ANALYSIS_CSC,
    ANALYSIS_KCFA,
    ANALYSIS_KOBJ,
    PATTERN_CONTAINER,
)
from core.ir import Program
from core.parser import link_programs, parse_program
from core.pfg import AnalysisResult, result_document, sort_key
from core.solver import solve
from modules.clients import Metrics, compute_metrics
from modules.ctxsens import project_to_ci, solve_context_sensitive
from modules.cutshortcut import ContainerModel, csc_policy, load_container_model
from modules.cutshortcut.container_model import library_paths, validate_model
from schemas.run_config import parse_selector
from utils.errors import IRError

logger = logger.bind(module="analysis")

_FLAVOR = {ANALYSIS_KCFA: "callsite", ANALYSIS_KOBJ: "object"}


class ProgramCheckError(IRError):
    """Raised when a parsed program has well-formedness diagnostics."""

    def __init__(self, path: str, diagnostics: list[Diagnostic]) -> None:
        lines = [f"{d.code} at {d.where}: {d.message}" for d in diagnostics]
        super().__init__(f"{path}: " + "; ".join(lines))
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class LoadedProgram:
    path: Path
    program: Program
    model: ContainerModel | None


def read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IRError(f"cannot read {path}: {exc.strerror or exc}") from exc


def load_program(
    path: Path,
    *,
    entry: str = "Main.main",
    model_path: Path | None = None,
) -> LoadedProgram:
    """Parse ``path``, link the model's library and check the result.

    Raises:
        IRError: On unreadable, malformed or ill-formed input.
        ContainerModelError: On an invalid container model.
    """

    return load_source(read_text(path), path=path, entry=entry, model_path=model_path)


def load_source(
    text: str,
    *,
    path: Path = Path("<input>"),
    entry: str = "Main.main",
    model_path: Path | None = None,
) -> LoadedProgram:
    program = parse_program(text, entry)
    model: ContainerModel | None = None
    if model_path is not None:
        model = load_container_model(read_text(model_path))
        libraries = [
            parse_program(read_text(lib), entry) for lib in library_paths(model, model_path)
        ]
        if libraries:
            program = link_programs(program, libraries)
        model = validate_model(model, program)
    diagnostics = check_program(program)
    if diagnostics:
        raise ProgramCheckError(str(path), diagnostics)
    return LoadedProgram(path, program, model)


def run_analysis(
    program: Program,
    analysis: str,
    *,
    patterns: Iterable[str] = ALL_PATTERNS,
    model: ContainerModel | None = None,
    max_seconds: float | None = None,
) -> AnalysisResult:
    """Run ``analysis`` (``ci``, ``csc``, ``kcfa:K`` or ``kobj:K``) on ``program``.

    Raises:
        AnalysisTimeout: If a context-sensitive run exceeds ``max_seconds``.
    """

    name, depth = parse_selector(analysis)
    if name == ANALYSIS_CI:
        return solve(program)
    if name == ANALYSIS_CSC:
        patterns = set(patterns)
        active_model = model if PATTERN_CONTAINER in patterns else None
        return solve(program, csc_policy(program, patterns, active_model))
    cs = solve_context_sensitive(program, _FLAVOR[name], depth or 0, max_seconds=max_seconds)
    return project_to_ci(cs)


def hosts_document(result: AnalysisResult) -> dict[str, list[str]]:
    return {
        str(ptr): sorted(objs)
        for ptr, objs in sorted(result.hosts.items(), key=lambda kv: sort_key(kv[0]))
        if objs
    }


def analysis_report(program: Program, result: AnalysisResult) -> tuple[dict[str, Any], Metrics]:
    """Result document extended with client metrics and host sets."""
    metrics = compute_metrics(program, result)
    doc = result_document(result)
    doc["metrics"] = metrics.document()
    doc["ptH"] = hosts_document(result)
    return doc, metrics


def pointer_sets(result: AnalysisResult) -> dict[str, frozenset[str]]:
    return {str(ptr): objs for ptr, objs in result.pt.items() if objs}


def dominance_violations(result: AnalysisResult, baseline: AnalysisResult) -> list[str]:
    """Pointers whose points-to set is not contained in the baseline's."""
    base = pointer_sets(baseline)
    out: list[str] = []
    for name, objs in sorted(pointer_sets(result).items()):
        extra = objs - base.get(name, frozenset())
        if extra:
            out.append(f"pt {name} has {', '.join(sorted(extra))} beyond the baseline")
    return out


__all__ = [
    "ProgramCheckError",
    "LoadedProgram",
    "read_text",
    "load_program",
    "load_source",
    "run_analysis",
    "analysis_report",
    "hosts_document",
    "pointer_sets",
    "dominance_violations",
]
