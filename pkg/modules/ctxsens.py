"""Context-sensitive reference analyses: k-call-site and k-object.

Both flavors apply the same inclusion rules as :mod:`core.solver`, lifted
over contexts. Method contexts keep the last ``k`` elements (call-site
labels or receiver allocation sites), heap contexts the last ``k - 1``
elements of the allocating method's context. Static calls under the object
flavor reuse the caller's context.
"""

from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from loguru import logger

from core.events import (
    ANALYSIS_KCFA,
    ANALYSIS_KOBJ,
    EDGE_ASSIGN,
    EDGE_LOAD,
    EDGE_PARAM,
    EDGE_RETURN,
    EDGE_STORE,
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
from core.pfg import AnalysisResult, FieldPtr, PfgEdge, Pointer, VarPtr
from core.solver import arity_mismatch, dispatch_failure
from utils.errors import AnalysisTimeout

logger = logger.bind(module="ctxsens")

Context = tuple[str, ...]
FLAVORS = {"callsite": ANALYSIS_KCFA, "object": ANALYSIS_KOBJ}


@dataclass(frozen=True, order=True)
class CSObj:
    hctx: Context
    site: str


@dataclass(frozen=True)
class CSVar:
    ctx: Context
    method: str
    name: str


@dataclass(frozen=True)
class CSField:
    obj: CSObj
    field: str


CSPointer = Union[CSVar, CSField]


def _key(ptr: CSPointer) -> tuple:
    if isinstance(ptr, CSVar):
        return (0, ptr.ctx, ptr.method, ptr.name)
    return (1, ptr.obj.hctx, ptr.obj.site, ptr.field)


def truncate(elements: Iterable[str], k: int) -> Context:
    items = tuple(elements)
    return items[-k:] if k > 0 else ()


@dataclass(frozen=True)
class CSResult:
    flavor: str
    k: int
    pt: Mapping[CSPointer, frozenset[CSObj]]
    edges: frozenset[tuple[CSPointer, CSPointer, str, str]]
    call_edges: frozenset[tuple[Context, str, Context, str]]
    reachable: frozenset[tuple[Context, str]]
    diagnostics: tuple[str, ...] = ()
    contexts: int = field(default=0, compare=False)


class ContextSensitiveSolver:
    def __init__(
        self,
        program: Program,
        flavor: str,
        k: int,
        max_seconds: float | None = None,
    ) -> None:
        if flavor not in FLAVORS:
            raise ValueError(f"unknown context flavor {flavor!r}")
        if k < 0:
            raise ValueError("k must be non-negative")
        self.program = program
        self.flavor = flavor
        self.k = k
        self.max_seconds = max_seconds
        self.pt: dict[CSPointer, set[CSObj]] = defaultdict(set)
        self.succ: dict[CSPointer, set[CSPointer]] = defaultdict(set)
        self.edges: dict[tuple[CSPointer, CSPointer, str], str] = {}
        self.call_edges: set[tuple[Context, str, Context, str]] = set()
        self.reachable: set[tuple[Context, str]] = set()
        self.diagnostics: set[str] = set()
        self.worklist: deque[tuple[CSPointer, frozenset[CSObj]]] = deque()
        self.loads: dict[CSPointer, list[tuple[Load, MethodDef, Context]]] = defaultdict(list)
        self.stores: dict[CSPointer, list[tuple[Store, MethodDef, Context]]] = defaultdict(list)
        self.calls: dict[CSPointer, list[tuple[Invoke, MethodDef, Context]]] = defaultdict(list)

    # Context selection ----------------------------------------------------

    def heap_context(self, ctx: Context) -> Context:
        return truncate(ctx, self.k - 1)

    def callee_context(self, ctx: Context, call: Invoke, receiver: CSObj | None) -> Context:
        if self.flavor == "callsite":
            return truncate(ctx + (call.label,), self.k)
        if receiver is None:
            return ctx
        return truncate(receiver.hctx + (receiver.site,), self.k)

    # Graph ----------------------------------------------------------------

    def add_edge(self, source: CSPointer, target: CSPointer, kind: str, label: str) -> None:
        key = (source, target, kind)
        if key in self.edges:
            self.edges[key] = min(self.edges[key], label)
            return
        self.edges[key] = label
        self.succ[source].add(target)
        objs = self.pt.get(source)
        if objs:
            self.worklist.append((target, frozenset(objs)))

    def add_reachable(self, ctx: Context, method: MethodDef) -> None:
        key = (ctx, method.qname)
        if key in self.reachable:
            return
        self.reachable.add(key)
        q = method.qname
        for stmt in method.body:
            if isinstance(stmt, New):
                obj = CSObj(self.heap_context(ctx), stmt.site)
                self.worklist.append((CSVar(ctx, q, stmt.lhs), frozenset({obj})))
            elif isinstance(stmt, (Assign, Cast)):
                if stmt.rhs is not None:
                    self.add_edge(
                        CSVar(ctx, q, stmt.rhs), CSVar(ctx, q, stmt.lhs), EDGE_ASSIGN, stmt.label
                    )
            elif isinstance(stmt, Load):
                base = CSVar(ctx, q, stmt.base)
                self.loads[base].append((stmt, method, ctx))
                self.load_objects(stmt, method, ctx, self.pt.get(base, ()))
            elif isinstance(stmt, Store):
                base = CSVar(ctx, q, stmt.base)
                self.stores[base].append((stmt, method, ctx))
                self.store_objects(stmt, method, ctx, self.pt.get(base, ()))
            elif isinstance(stmt, Invoke):
                if stmt.is_virtual:
                    receiver = CSVar(ctx, q, stmt.receiver or "")
                    self.calls[receiver].append((stmt, method, ctx))
                    self.call_objects(stmt, method, ctx, self.pt.get(receiver, ()))
                else:
                    callee = resolve_static(self.program, stmt.cls or "", stmt.method)
                    if callee is None:
                        self.diagnostics.add(
                            dispatch_failure(stmt.label, stmt.cls or "", stmt.method)
                        )
                    elif callee.arity != len(stmt.args):
                        self.diagnostics.add(arity_mismatch(stmt.label, callee.qname))
                    else:
                        callee_ctx = self.callee_context(ctx, stmt, None)
                        self.add_call_edge(stmt, method, ctx, callee, callee_ctx)

    def load_objects(
        self, stmt: Load, method: MethodDef, ctx: Context, objs: Iterable[CSObj]
    ) -> None:
        target = CSVar(ctx, method.qname, stmt.lhs)
        for obj in sorted(objs):
            self.add_edge(CSField(obj, stmt.field), target, EDGE_LOAD, stmt.label)

    def store_objects(
        self, stmt: Store, method: MethodDef, ctx: Context, objs: Iterable[CSObj]
    ) -> None:
        source = CSVar(ctx, method.qname, stmt.rhs)
        for obj in sorted(objs):
            self.add_edge(source, CSField(obj, stmt.field), EDGE_STORE, stmt.label)

    def call_objects(
        self, stmt: Invoke, method: MethodDef, ctx: Context, objs: Iterable[CSObj]
    ) -> None:
        for obj in sorted(objs):
            type_name = self.program.type_of(obj.site)
            callee = dispatch(self.program, type_name, stmt.method)
            if callee is None:
                self.diagnostics.add(dispatch_failure(stmt.label, type_name, stmt.method))
                continue
            if callee.arity != len(stmt.args):
                self.diagnostics.add(arity_mismatch(stmt.label, callee.qname))
                continue
            callee_ctx = self.callee_context(ctx, stmt, obj)
            self.worklist.append((CSVar(callee_ctx, callee.qname, THIS), frozenset({obj})))
            self.add_call_edge(stmt, method, ctx, callee, callee_ctx)

    def add_call_edge(
        self,
        stmt: Invoke,
        caller: MethodDef,
        ctx: Context,
        callee: MethodDef,
        callee_ctx: Context,
    ) -> None:
        key = (ctx, stmt.label, callee_ctx, callee.qname)
        if key in self.call_edges:
            return
        self.call_edges.add(key)
        self.add_reachable(callee_ctx, callee)
        for k in range(1, callee.arity + 1):
            self.add_edge(
                CSVar(ctx, caller.qname, stmt.arg(k) or ""),
                CSVar(callee_ctx, callee.qname, callee.param_at(k) or ""),
                EDGE_PARAM,
                stmt.label,
            )
        if stmt.lhs and callee.ret_var:
            self.add_edge(
                CSVar(callee_ctx, callee.qname, callee.ret_var),
                CSVar(ctx, caller.qname, stmt.lhs),
                EDGE_RETURN,
                stmt.label,
            )

    def propagate(self, ptr: CSPointer, delta: frozenset[CSObj]) -> None:
        for target in sorted(self.succ.get(ptr, ()), key=_key):
            self.worklist.append((target, delta))
        if isinstance(ptr, CSVar):
            for stmt, method, ctx in list(self.loads.get(ptr, ())):
                self.load_objects(stmt, method, ctx, delta)
            for stmt, method, ctx in list(self.stores.get(ptr, ())):
                self.store_objects(stmt, method, ctx, delta)
            for stmt, method, ctx in list(self.calls.get(ptr, ())):
                self.call_objects(stmt, method, ctx, delta)

    def solve(self) -> CSResult:
        started = time.monotonic()
        name = f"{FLAVORS[self.flavor]}:{self.k}"
        self.add_reachable((), self.program.method(self.program.entry))
        steps = 0
        while self.worklist:
            ptr, objs = self.worklist.popleft()
            steps += 1
            if self.max_seconds is not None and steps % 1024 == 0:
                if time.monotonic() - started > self.max_seconds:
                    raise AnalysisTimeout(name, self.max_seconds)
            current = self.pt[ptr]
            delta = frozenset(o for o in objs if o not in current)
            if delta:
                current.update(delta)
                self.propagate(ptr, delta)
        contexts = len({ctx for ctx, _ in self.reachable})
        logger.debug("Solved", analysis=name, steps=steps, contexts=contexts)
        return CSResult(
            flavor=self.flavor,
            k=self.k,
            pt={ptr: frozenset(objs) for ptr, objs in self.pt.items() if objs},
            edges=frozenset((s, t, kind, label) for (s, t, kind), label in self.edges.items()),
            call_edges=frozenset(self.call_edges),
            reachable=frozenset(self.reachable),
            diagnostics=tuple(sorted(self.diagnostics)),
            contexts=contexts,
        )


def solve_context_sensitive(
    program: Program,
    flavor: str,
    k: int,
    max_seconds: float | None = None,
) -> CSResult:
    """Run the ``flavor`` (``callsite`` or ``object``) analysis with depth ``k``."""
    return ContextSensitiveSolver(program, flavor, k, max_seconds).solve()


def _project(ptr: CSPointer) -> Pointer:
    if isinstance(ptr, CSVar):
        return VarPtr(ptr.method, ptr.name)
    return FieldPtr(ptr.obj.site, ptr.field)


def project_to_ci(result: CSResult) -> AnalysisResult:
    """Forget contexts: union points-to sets, call edges and reachable methods."""
    pt: dict[Pointer, set[str]] = defaultdict(set)
    for ptr, objs in result.pt.items():
        pt[_project(ptr)].update(obj.site for obj in objs)
    edges: dict[tuple[Pointer, Pointer, str], str] = {}
    for source, target, kind, label in result.edges:
        key = (_project(source), _project(target), kind)
        edges[key] = min(edges.get(key, label), label)
    nodes = set(pt)
    for source, target, _ in edges:
        nodes.update((source, target))
    return AnalysisResult(
        pt={ptr: frozenset(objs) for ptr, objs in pt.items() if objs},
        edges=frozenset(PfgEdge(s, t, kind, label) for (s, t, kind), label in edges.items()),
        nodes=frozenset(nodes),
        call_edges=frozenset((label, callee) for _, label, _, callee in result.call_edges),
        reachable=frozenset(method for _, method in result.reachable),
        diagnostics=result.diagnostics,
    )


__all__ = [
    "CSObj",
    "CSVar",
    "CSField",
    "CSResult",
    "ContextSensitiveSolver",
    "solve_context_sensitive",
    "project_to_ci",
    "truncate",
]
