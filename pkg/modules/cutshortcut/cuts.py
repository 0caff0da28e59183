"""Cut sets of the three patterns, computed before propagation starts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from loguru import logger

from core.events import (
    PATTERN_CONTAINER,
    PATTERN_FIELD,
    PATTERN_FIELD_LOAD,
    PATTERN_FIELD_STORE,
    PATTERN_LOCAL,
    TAG_CONTAINER,
    TAG_FIELD_LOAD,
    TAG_LOCAL_FLOW,
)
from core.ir import (
    THIS,
    Assign,
    Invoke,
    Load,
    MethodDef,
    New,
    Program,
    Store,
    defined_var,
    free_params,
    resolve_static,
)
from modules.cutshortcut.container_model import ContainerModel

logger = logger.bind(module="cuts")

# Internal pattern switches after expanding "field"
_ENABLED = {PATTERN_FIELD_STORE, PATTERN_FIELD_LOAD, PATTERN_CONTAINER, PATTERN_LOCAL}


def expand_patterns(patterns: Iterable[str]) -> frozenset[str]:
    """Expand ``field`` into its store and load halves and validate names."""
    out: set[str] = set()
    for name in patterns:
        if name == PATTERN_FIELD:
            out.update((PATTERN_FIELD_STORE, PATTERN_FIELD_LOAD))
        elif name in _ENABLED:
            out.add(name)
        else:
            raise ValueError(f"unknown pattern {name!r}")
    return frozenset(out)


@dataclass(frozen=True)
class CutSets:
    cut_stores: frozenset[str] = frozenset()
    cut_returns: Mapping[str, frozenset[str]] = field(default_factory=dict)
    local_flow: Mapping[str, frozenset[int]] = field(default_factory=dict)

    def tags(self, method: str) -> frozenset[str]:
        return self.cut_returns.get(method, frozenset())

    def is_load_cut(self, method: str) -> bool:
        return TAG_FIELD_LOAD in self.tags(method)


def param_return_flow(method: MethodDef) -> dict[str, frozenset[int]]:
    """Return, per variable, the parameter indices its values come from.

    A parameter with no defining statement flows from its own index. A
    variable whose every defining statement is ``x = y`` with ``y`` already
    related inherits the union of their indices. Anything else (allocation,
    load, call, cast, null) blocks the relation.
    """

    rel: dict[str, frozenset[int]] = {
        name: frozenset({index}) for name, index in free_params(method).items()
    }
    defs: dict[str, list] = {}
    for stmt in method.body:
        var = defined_var(stmt)
        if var is not None:
            defs.setdefault(var, []).append(stmt)
    changed = True
    while changed:
        changed = False
        for var, stmts in defs.items():
            if not all(isinstance(s, Assign) and s.rhs in rel for s in stmts):
                continue
            merged = frozenset().union(*(rel[s.rhs] for s in stmts))
            if rel.get(var) != merged:
                rel[var] = merged
                changed = True
    return rel


def call_candidates(program: Program, stmt: Invoke) -> list[MethodDef]:
    """Class-hierarchy callee candidates of ``stmt``."""
    if stmt.is_virtual:
        return [m for m in program.implementations(stmt.method) if m.arity == len(stmt.args)]
    target = resolve_static(program, stmt.cls or "", stmt.method)
    return [target] if target is not None else []


def _cut_stores(program: Program) -> set[str]:
    labels: set[str] = set()
    for method in program.methods():
        free = free_params(method)
        for stmt in method.body:
            if (
                isinstance(stmt, Store)
                and stmt.base in free
                and free.get(stmt.rhs, 0) >= 1
            ):
                labels.add(stmt.label)
    return labels


def load_bases(program: Program) -> dict[str, frozenset[int]]:
    """Parameter indices whose field value a method may return directly.

    A method qualifies through ``ret = p.f`` with ``p`` an unredefined
    parameter, or through ``ret = call(..)`` where a candidate callee
    qualifies on an argument that is an unredefined parameter here. Methods
    whose return variable is ``this`` or is allocated are excluded.
    """

    eligible: list[MethodDef] = []
    for method in program.methods():
        ret = method.ret_var
        if ret is None or ret == THIS:
            continue
        if any(isinstance(s, New) and s.lhs == ret for s in method.body):
            continue
        eligible.append(method)

    bases: dict[str, frozenset[int]] = {}
    changed = True
    while changed:
        changed = False
        for method in eligible:
            free = free_params(method)
            found: set[int] = set(bases.get(method.qname, frozenset()))
            for stmt in method.body:
                if defined_var(stmt) != method.ret_var:
                    continue
                if isinstance(stmt, Load) and stmt.base in free:
                    found.add(free[stmt.base])
                elif isinstance(stmt, Invoke):
                    for callee in call_candidates(program, stmt):
                        for k in bases.get(callee.qname, frozenset()):
                            arg = stmt.arg(k)
                            if arg in free:
                                found.add(free[arg])
            if found and frozenset(found) != bases.get(method.qname):
                bases[method.qname] = frozenset(found)
                changed = True
    return bases


def compute_cuts(
    program: Program,
    patterns: Iterable[str],
    model: ContainerModel | None = None,
) -> CutSets:
    """Compute cut stores and tagged cut returns for the enabled patterns."""
    enabled = expand_patterns(patterns)
    cut_stores = _cut_stores(program) if PATTERN_FIELD_STORE in enabled else set()
    returns: dict[str, set[str]] = {}
    local_flow: dict[str, frozenset[int]] = {}

    if PATTERN_FIELD_LOAD in enabled:
        for qname in load_bases(program):
            returns.setdefault(qname, set()).add(TAG_FIELD_LOAD)
    if PATTERN_LOCAL in enabled:
        for method in program.methods():
            if method.ret_var is None:
                continue
            indices = param_return_flow(method).get(method.ret_var)
            if indices and 0 not in indices:
                returns.setdefault(method.qname, set()).add(TAG_LOCAL_FLOW)
                local_flow[method.qname] = indices
    if PATTERN_CONTAINER in enabled and model is not None:
        for qname, _ in model.exits:
            returns.setdefault(qname, set()).add(TAG_CONTAINER)

    cuts = CutSets(
        cut_stores=frozenset(cut_stores),
        cut_returns={q: frozenset(tags) for q, tags in returns.items()},
        local_flow=local_flow,
    )
    logger.debug(
        "Computed cuts",
        patterns=sorted(enabled),
        stores=len(cuts.cut_stores),
        returns=len(cuts.cut_returns),
    )
    return cuts


__all__ = [
    "CutSets",
    "expand_patterns",
    "param_return_flow",
    "call_candidates",
    "load_bases",
    "compute_cuts",
]
