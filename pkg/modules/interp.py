"""Bounded exhaustive interpreter producing dynamic points-to facts.

Every resolution of ``if *`` branches is explored depth first by replaying
choice prefixes. Each path is bounded by a step budget and the number of
paths by a path budget; hitting either sets ``exhausted``. Instances are
projected to their allocation site, so the facts are directly comparable
with static results.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Mapping

from loguru import logger

from core.ir import (
    THIS,
    Assign,
    BranchNondet,
    Cast,
    Goto,
    Invoke,
    Load,
    MethodDef,
    New,
    Program,
    Return,
    Store,
    dispatch,
    resolve_static,
    subtype_of,
)
from core.pfg import AnalysisResult, FieldPtr, VarPtr

logger = logger.bind(module="interp")

ALWAYS_OK = "alwaysOk"
MAY_FAIL = "mayFail"


@dataclass(frozen=True)
class Budget:
    max_steps: int = 10_000
    max_paths: int = 1_000

    def __post_init__(self) -> None:
        if self.max_steps <= 0 or self.max_paths <= 0:
            raise ValueError("budgets must be positive integers")


@dataclass(frozen=True)
class DynamicFacts:
    reach_methods: frozenset[str] = frozenset()
    call_edges: frozenset[tuple[str, str]] = frozenset()
    var_points_to: Mapping[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    field_points_to: Mapping[tuple[str, str], frozenset[str]] = field(default_factory=dict)
    cast_outcomes: Mapping[str, str] = field(default_factory=dict)
    exhausted: bool = False
    paths: int = 0
    null_derefs: int = 0

    def var(self, method: str, name: str) -> frozenset[str]:
        return self.var_points_to.get((method, name), frozenset())


class _PathEnd(Exception):
    """Ends the current path."""

    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


@dataclass
class _Obj:
    site: str
    type: str
    fields: dict[str, int | None] = field(default_factory=dict)


@dataclass
class _Frame:
    method: MethodDef
    env: dict[str, int | None]
    ret_lhs: str | None = None
    pc: int = 0


class _Recorder:
    def __init__(self) -> None:
        self.reach: set[str] = set()
        self.calls: set[tuple[str, str]] = set()
        self.vars: dict[tuple[str, str], set[str]] = defaultdict(set)
        self.fields: dict[tuple[str, str], set[str]] = defaultdict(set)
        self.casts: dict[str, str] = {}
        self.exhausted = False
        self.null_derefs = 0

    def cast(self, label: str, ok: bool) -> None:
        if not ok:
            self.casts[label] = MAY_FAIL
        else:
            self.casts.setdefault(label, ALWAYS_OK)


class _Path:
    def __init__(
        self, program: Program, choices: list[bool], budget: Budget, rec: _Recorder
    ) -> None:
        self.program = program
        self.choices = choices
        self.taken: list[bool] = []
        self.budget = budget
        self.rec = rec
        self.heap: list[_Obj] = []
        self.frames: list[_Frame] = []

    def choose(self) -> bool:
        index = len(self.taken)
        choice = self.choices[index] if index < len(self.choices) else False
        self.taken.append(choice)
        return choice

    def assign(self, frame: _Frame, var: str, value: int | None) -> None:
        frame.env[var] = value
        if value is not None:
            self.rec.vars[(frame.method.qname, var)].add(self.heap[value].site)

    def deref(self, frame: _Frame, var: str) -> _Obj:
        value = frame.env.get(var)
        if value is None:
            self.rec.null_derefs += 1
            raise _PathEnd("null-dereference")
        return self.heap[value]

    def enter(
        self,
        method: MethodDef,
        receiver: int | None,
        args: list[int | None],
        ret_lhs: str | None,
    ) -> None:
        self.rec.reach.add(method.qname)
        frame = _Frame(method, {}, ret_lhs)
        if not method.static:
            self.assign(frame, THIS, receiver)
        for k, value in enumerate(args, start=1):
            param = method.param_at(k)
            if param is not None:
                self.assign(frame, param, value)
        self.frames.append(frame)

    def leave(self, value: int | None) -> None:
        frame = self.frames.pop()
        if self.frames and frame.ret_lhs:
            self.assign(self.frames[-1], frame.ret_lhs, value)

    def invoke(self, frame: _Frame, stmt: Invoke) -> None:
        args = [frame.env.get(a) for a in stmt.args]
        if stmt.is_virtual:
            receiver = frame.env.get(stmt.receiver or "")
            obj = self.deref(frame, stmt.receiver or "")
            callee = dispatch(self.program, obj.type, stmt.method)
        else:
            receiver = None
            callee = resolve_static(self.program, stmt.cls or "", stmt.method)
        if callee is None or callee.arity != len(args):
            raise _PathEnd("dispatch-failure")
        self.rec.calls.add((stmt.label, callee.qname))
        self.enter(callee, receiver, args, stmt.lhs)

    def step(self, frame: _Frame) -> None:
        body = frame.method.body
        if frame.pc >= len(body):
            self.leave(None)
            return
        stmt = body[frame.pc]
        frame.pc += 1
        if isinstance(stmt, New):
            self.heap.append(_Obj(stmt.site, stmt.type))
            self.assign(frame, stmt.lhs, len(self.heap) - 1)
        elif isinstance(stmt, Assign):
            value = frame.env.get(stmt.rhs) if stmt.rhs is not None else None
            self.assign(frame, stmt.lhs, value)
        elif isinstance(stmt, Store):
            obj = self.deref(frame, stmt.base)
            value = frame.env.get(stmt.rhs)
            obj.fields[stmt.field] = value
            if value is not None:
                self.rec.fields[(obj.site, stmt.field)].add(self.heap[value].site)
        elif isinstance(stmt, Load):
            obj = self.deref(frame, stmt.base)
            self.assign(frame, stmt.lhs, obj.fields.get(stmt.field))
        elif isinstance(stmt, Cast):
            value = frame.env.get(stmt.rhs)
            if value is not None:
                ok = subtype_of(self.program, self.heap[value].type, stmt.type)
                self.rec.cast(stmt.label, ok)
                if not ok:
                    raise _PathEnd("cast-failure")
            self.assign(frame, stmt.lhs, value)
        elif isinstance(stmt, Invoke):
            self.invoke(frame, stmt)
        elif isinstance(stmt, Return):
            self.leave(frame.env.get(stmt.var) if stmt.var else None)
        elif isinstance(stmt, BranchNondet):
            if self.choose():
                frame.pc = frame.method.target_index(stmt.target)
        elif isinstance(stmt, Goto):
            frame.pc = frame.method.target_index(stmt.target)

    def run(self) -> str:
        self.enter(self.program.method(self.program.entry), None, [], None)
        steps = 0
        try:
            while self.frames:
                steps += 1
                if steps > self.budget.max_steps:
                    self.rec.exhausted = True
                    return "step-budget"
                self.step(self.frames[-1])
        except _PathEnd as end:
            return end.reason
        return "completed"


def explore(program: Program, budget: Budget | None = None) -> DynamicFacts:
    """Enumerate executions of ``program`` within ``budget`` and union their facts."""
    budget = budget or Budget()
    rec = _Recorder()
    pending: list[list[bool]] = [[]]
    paths = 0
    while pending:
        if paths >= budget.max_paths:
            rec.exhausted = True
            break
        prefix = pending.pop()
        path = _Path(program, prefix, budget, rec)
        path.run()
        paths += 1
        for i in range(len(path.taken) - 1, len(prefix) - 1, -1):
            pending.append(path.taken[:i] + [True])
    logger.debug("Explored", paths=paths, exhausted=rec.exhausted)
    return DynamicFacts(
        reach_methods=frozenset(rec.reach),
        call_edges=frozenset(rec.calls),
        var_points_to={key: frozenset(v) for key, v in rec.vars.items()},
        field_points_to={key: frozenset(v) for key, v in rec.fields.items()},
        cast_outcomes=dict(rec.casts),
        exhausted=rec.exhausted,
        paths=paths,
        null_derefs=rec.null_derefs,
    )


@dataclass(frozen=True)
class RecallReport:
    violations: tuple[str, ...]
    facts: int

    @property
    def recall(self) -> float:
        if not self.facts:
            return 1.0
        return 1.0 - len(self.violations) / self.facts

    @property
    def ok(self) -> bool:
        return not self.violations


def check_recall(facts: DynamicFacts, result: AnalysisResult) -> RecallReport:
    """List every dynamic fact that ``result`` fails to over-approximate."""
    missing: list[str] = []
    total = 0
    for method in sorted(facts.reach_methods):
        total += 1
        if method not in result.reachable:
            missing.append(f"reachable {method}")
    for label, method in sorted(facts.call_edges):
        total += 1
        if (label, method) not in result.call_edges:
            missing.append(f"call-edge {label} -> {method}")
    for (method, var), objs in sorted(facts.var_points_to.items()):
        ptr = VarPtr(method, var)
        have = result.points_to(ptr)
        for obj in sorted(objs):
            total += 1
            if obj not in have:
                missing.append(f"pt {ptr} -> {obj}")
    for (site, field_name), objs in sorted(facts.field_points_to.items()):
        ptr = FieldPtr(site, field_name)
        have = result.points_to(ptr)
        for obj in sorted(objs):
            total += 1
            if obj not in have:
                missing.append(f"pt {ptr} -> {obj}")
    return RecallReport(tuple(missing), total)


def facts_document(facts: DynamicFacts) -> dict[str, Any]:
    return {
        "reachMethods": sorted(facts.reach_methods),
        "callEdges": sorted([label, method] for label, method in facts.call_edges),
        "varPointsTo": {
            str(VarPtr(m, v)): sorted(objs) for (m, v), objs in sorted(facts.var_points_to.items())
        },
        "fieldPointsTo": {
            str(FieldPtr(s, f)): sorted(objs)
            for (s, f), objs in sorted(facts.field_points_to.items())
        },
        "castOutcomes": dict(sorted(facts.cast_outcomes.items())),
        "exhausted": facts.exhausted,
        "paths": facts.paths,
        "nullDerefs": facts.null_derefs,
    }


def serialize_facts(facts: DynamicFacts) -> str:
    return json.dumps(facts_document(facts), sort_keys=True, indent=2)


__all__ = [
    "ALWAYS_OK",
    "MAY_FAIL",
    "Budget",
    "DynamicFacts",
    "explore",
    "RecallReport",
    "check_recall",
    "facts_document",
    "serialize_facts",
]
