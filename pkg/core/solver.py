"""Worklist pointer analysis over an explicit pointer flow graph.

The solver applies the base inclusion rules (allocation, assignment,
propagation, load, store, call, parameter and return) with difference
propagation and an on-the-fly call graph. An :class:`EdgePolicy` decides
which store and return edges are cut and may add shortcut edges through the
hooks it receives; the default policy cuts nothing, which yields plain
context-insensitive analysis.
"""

from __future__ import annotations

from collections import defaultdict, deque
from typing import Iterable

from loguru import logger

from core.events import (
    EDGE_ASSIGN,
    EDGE_LOAD,
    EDGE_PARAM,
    EDGE_RETURN,
    EDGE_SHORTCUT,
    EDGE_STORE,
    RULE_CUT_STORE,
)
from core.ir import (
    THIS,
    Assign,
    Cast,
    Invoke,
    Load,
    MethodDef,
    New,
    Program,
    Store,
    dispatch,
    resolve_static,
)
from core.pfg import (
    AnalysisResult,
    CutRecord,
    FieldPtr,
    PfgEdge,
    Pointer,
    PointsToSet,
    VarPtr,
    sort_key,
)

logger = logger.bind(module="solver")


def dispatch_failure(label: str, type_name: str, method_name: str) -> str:
    return f"dispatch-failure: {label} {type_name}.{method_name}"


def arity_mismatch(label: str, target: str) -> str:
    return f"arity-mismatch: {label} {target}"


class EdgePolicy:
    """Policy with no cuts and no shortcuts.

    Subclasses override the predicates and hooks; the solver calls
    :meth:`bind` once before propagation starts.
    """

    name = "ci"

    def bind(self, solver: "Solver") -> None:
        self.solver = solver

    def is_store_cut(self, stmt: Store) -> bool:
        return False

    def cut_return_tags(self, method: MethodDef) -> frozenset[str]:
        return frozenset()

    def on_call_edge(self, call: Invoke, caller: MethodDef, callee: MethodDef) -> None:
        """Called once per new call edge, after param edges are in place."""

    def on_points_to_delta(self, ptr: Pointer, delta: frozenset[str]) -> None:
        """Called after the solver handled a points-to delta on ``ptr``."""

    def on_edge_added(self, edge: PfgEdge) -> None:
        """Called once per new PFG edge."""

    def on_load_edge(self, stmt: Load, method: MethodDef, source: Pointer, target: Pointer) -> None:
        """Called just before a load edge is added."""

    def has_pending(self) -> bool:
        return False

    def flush(self) -> None:
        """Process policy-internal work queued by the hooks."""

    def hosts(self) -> dict[Pointer, frozenset[str]]:
        return {}


class Solver:
    def __init__(self, program: Program, policy: EdgePolicy | None = None) -> None:
        self.program = program
        self.policy = policy or EdgePolicy()
        self.pt: dict[Pointer, PointsToSet] = defaultdict(PointsToSet)
        self.succ: dict[Pointer, set[Pointer]] = defaultdict(set)
        self.edges: dict[tuple[Pointer, Pointer, str], str] = {}
        self.nodes: set[Pointer] = set()
        self.call_edges: set[tuple[str, str]] = set()
        self.callers: dict[str, list[tuple[Invoke, MethodDef]]] = defaultdict(list)
        self.reachable: set[str] = set()
        self.cuts: dict[tuple[Pointer, Pointer, str], str] = {}
        self.diagnostics: set[str] = set()
        self.worklist: deque[tuple[Pointer, frozenset[str]]] = deque()
        self.loads: dict[Pointer, list[tuple[Load, MethodDef]]] = defaultdict(list)
        self.stores: dict[Pointer, list[tuple[Store, MethodDef]]] = defaultdict(list)
        self.calls: dict[Pointer, list[tuple[Invoke, MethodDef]]] = defaultdict(list)
        self.steps = 0

    # Queries used by policies ---------------------------------------------

    def points_to(self, ptr: Pointer) -> frozenset[str]:
        if ptr not in self.pt:
            return frozenset()
        return self.pt[ptr].freeze()

    def call_sites_of(self, callee: str) -> list[tuple[Invoke, MethodDef]]:
        return list(self.callers.get(callee, ()))

    def type_of(self, site: str) -> str:
        return self.program.type_of(site)

    # Graph construction ---------------------------------------------------

    def add_edge(self, source: Pointer, target: Pointer, kind: str, provenance: str) -> bool:
        """Add ``source -> target`` unless present; returns ``True`` when new."""
        key = (source, target, kind)
        if key in self.edges:
            if provenance < self.edges[key]:
                self.edges[key] = provenance
            return False
        self.edges[key] = provenance
        self.succ[source].add(target)
        self.nodes.update((source, target))
        objs = self.points_to(source)
        if objs:
            self.worklist.append((target, objs))
        self.policy.on_edge_added(PfgEdge(source, target, kind, provenance))
        return True

    def add_shortcut(self, source: Pointer, target: Pointer, provenance: str) -> bool:
        return self.add_edge(source, target, EDGE_SHORTCUT, provenance)

    def add_objects(self, ptr: Pointer, objs: Iterable[str]) -> None:
        self.nodes.add(ptr)
        self.worklist.append((ptr, frozenset(objs)))

    def record_cut(self, source: Pointer, target: Pointer, kind: str, rule: str) -> None:
        key = (source, target, kind)
        if key not in self.cuts or rule < self.cuts[key]:
            self.cuts[key] = rule

    # Rules ----------------------------------------------------------------

    def add_reachable(self, method: MethodDef) -> None:
        if method.qname in self.reachable:
            return
        self.reachable.add(method.qname)
        q = method.qname
        for stmt in method.body:
            if isinstance(stmt, New):
                self.add_objects(VarPtr(q, stmt.lhs), [stmt.site])
            elif isinstance(stmt, (Assign, Cast)):
                if stmt.rhs is not None:
                    self.add_edge(VarPtr(q, stmt.rhs), VarPtr(q, stmt.lhs), EDGE_ASSIGN, stmt.label)
            elif isinstance(stmt, Load):
                base = VarPtr(q, stmt.base)
                self.loads[base].append((stmt, method))
                self.load_objects(stmt, method, self.points_to(base))
            elif isinstance(stmt, Store):
                base = VarPtr(q, stmt.base)
                self.stores[base].append((stmt, method))
                self.store_objects(stmt, method, self.points_to(base))
            elif isinstance(stmt, Invoke):
                if stmt.is_virtual:
                    receiver = VarPtr(q, stmt.receiver or "")
                    self.calls[receiver].append((stmt, method))
                    self.call_objects(stmt, method, self.points_to(receiver))
                else:
                    self.static_call(stmt, method)

    def load_objects(self, stmt: Load, method: MethodDef, objs: Iterable[str]) -> None:
        target = VarPtr(method.qname, stmt.lhs)
        for obj in sorted(objs):
            source = FieldPtr(obj, stmt.field)
            self.policy.on_load_edge(stmt, method, source, target)
            self.add_edge(source, target, EDGE_LOAD, stmt.label)

    def store_objects(self, stmt: Store, method: MethodDef, objs: Iterable[str]) -> None:
        source = VarPtr(method.qname, stmt.rhs)
        cut = self.policy.is_store_cut(stmt)
        for obj in sorted(objs):
            target = FieldPtr(obj, stmt.field)
            if cut:
                self.record_cut(source, target, EDGE_STORE, f"{RULE_CUT_STORE}:{stmt.label}")
            else:
                self.add_edge(source, target, EDGE_STORE, stmt.label)

    def call_objects(self, stmt: Invoke, method: MethodDef, objs: Iterable[str]) -> None:
        for obj in sorted(objs):
            type_name = self.program.type_of(obj)
            callee = dispatch(self.program, type_name, stmt.method)
            if callee is None:
                self.diagnostics.add(dispatch_failure(stmt.label, type_name, stmt.method))
                continue
            if callee.arity != len(stmt.args):
                self.diagnostics.add(arity_mismatch(stmt.label, callee.qname))
                continue
            self.add_objects(VarPtr(callee.qname, THIS), [obj])
            self.add_call_edge(stmt, method, callee)

    def static_call(self, stmt: Invoke, method: MethodDef) -> None:
        cls = stmt.cls or ""
        callee = resolve_static(self.program, cls, stmt.method)
        if callee is None:
            self.diagnostics.add(dispatch_failure(stmt.label, cls, stmt.method))
            return
        if callee.arity != len(stmt.args):
            self.diagnostics.add(arity_mismatch(stmt.label, callee.qname))
            return
        self.add_call_edge(stmt, method, callee)

    def add_call_edge(self, stmt: Invoke, caller: MethodDef, callee: MethodDef) -> None:
        key = (stmt.label, callee.qname)
        if key in self.call_edges:
            return
        self.call_edges.add(key)
        self.callers[callee.qname].append((stmt, caller))
        self.add_reachable(callee)
        for k in range(1, callee.arity + 1):
            arg = stmt.arg(k)
            param = callee.param_at(k)
            if arg is None or param is None:
                continue
            self.add_edge(
                VarPtr(caller.qname, arg), VarPtr(callee.qname, param), EDGE_PARAM, stmt.label
            )
        if stmt.lhs and callee.ret_var:
            source = VarPtr(callee.qname, callee.ret_var)
            target = VarPtr(caller.qname, stmt.lhs)
            tags = self.policy.cut_return_tags(callee)
            if tags:
                self.record_cut(source, target, EDGE_RETURN, "cutReturn:" + "+".join(sorted(tags)))
            else:
                self.add_edge(source, target, EDGE_RETURN, stmt.label)
        self.policy.on_call_edge(stmt, caller, callee)

    def propagate(self, ptr: Pointer, delta: frozenset[str]) -> None:
        for target in sorted(self.succ.get(ptr, ()), key=sort_key):
            self.worklist.append((target, delta))
        if isinstance(ptr, VarPtr):
            for stmt, method in list(self.loads.get(ptr, ())):
                self.load_objects(stmt, method, delta)
            for stmt, method in list(self.stores.get(ptr, ())):
                self.store_objects(stmt, method, delta)
            for stmt, method in list(self.calls.get(ptr, ())):
                self.call_objects(stmt, method, delta)
        self.policy.on_points_to_delta(ptr, delta)

    # Driver ---------------------------------------------------------------

    def solve(self) -> AnalysisResult:
        self.policy.bind(self)
        self.add_reachable(self.program.method(self.program.entry))
        while True:
            if self.worklist:
                ptr, objs = self.worklist.popleft()
                self.steps += 1
                self.nodes.add(ptr)
                delta = self.pt[ptr].add_all(objs)
                if delta:
                    self.propagate(ptr, delta)
            elif self.policy.has_pending():
                self.policy.flush()
            else:
                break
        result = self.result()
        logger.debug(
            "Solved",
            policy=self.policy.name,
            steps=self.steps,
            nodes=len(result.nodes),
            edges=len(result.edges),
            shortcuts=len(result.shortcuts),
            cuts=len(result.cut_log),
        )
        return result

    def result(self) -> AnalysisResult:
        edges = frozenset(
            PfgEdge(s, t, kind, prov) for (s, t, kind), prov in self.edges.items()
        )
        cut_log = frozenset(
            CutRecord(s, t, kind, rule)
            for (s, t, kind), rule in self.cuts.items()
            if (s, t, kind) not in self.edges
        )
        nodes = set(self.nodes)
        for record in cut_log:
            nodes.update((record.source, record.target))
        return AnalysisResult(
            pt={ptr: objs.freeze() for ptr, objs in self.pt.items() if len(objs)},
            edges=edges,
            nodes=frozenset(nodes),
            call_edges=frozenset(self.call_edges),
            reachable=frozenset(self.reachable),
            cut_log=cut_log,
            diagnostics=tuple(sorted(self.diagnostics)),
            hosts=self.policy.hosts(),
        )


def solve(program: Program, policy: EdgePolicy | None = None) -> AnalysisResult:
    """Run the analysis of ``program`` under ``policy`` to a fixpoint."""
    return Solver(program, policy).solve()


__all__ = [
    "EdgePolicy",
    "Solver",
    "solve",
    "dispatch_failure",
    "arity_mismatch",
]
