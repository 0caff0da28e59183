"""Naive rule-iteration evaluator used as an oracle for :mod:`core.solver`.

Every round re-applies all base rules to every statement of every reachable
method and then pushes points-to sets along every edge, until a round
changes nothing. It is slow and deliberately shares no code with the
worklist solver beyond the IR queries and diagnostic formats.
"""

from __future__ import annotations

from collections import defaultdict

from core.events import EDGE_ASSIGN, EDGE_LOAD, EDGE_PARAM, EDGE_RETURN, EDGE_STORE
from core.ir import (
    THIS,
    Assign,
    Cast,
    Invoke,
    Load,
    New,
    Program,
    Store,
    dispatch,
    resolve_static,
)
from core.pfg import AnalysisResult, FieldPtr, PfgEdge, Pointer, VarPtr
from core.solver import arity_mismatch, dispatch_failure


def naive_solve(program: Program) -> AnalysisResult:
    pt: dict[Pointer, set[str]] = defaultdict(set)
    edges: dict[tuple[Pointer, Pointer, str], str] = {}
    call_edges: set[tuple[str, str]] = set()
    reachable: set[str] = {program.entry}
    diagnostics: set[str] = set()

    def edge(source: Pointer, target: Pointer, kind: str, label: str) -> bool:
        key = (source, target, kind)
        if key in edges:
            edges[key] = min(edges[key], label)
            return False
        edges[key] = label
        return True

    def add_pt(ptr: Pointer, objs: set[str]) -> bool:
        if objs <= pt[ptr]:
            return False
        pt[ptr] |= objs
        return True

    changed = True
    while changed:
        changed = False
        for qname in sorted(reachable):
            method = program.method(qname)
            for stmt in method.body:
                if isinstance(stmt, New):
                    changed |= add_pt(VarPtr(qname, stmt.lhs), {stmt.site})
                elif isinstance(stmt, (Assign, Cast)) and stmt.rhs is not None:
                    changed |= edge(
                        VarPtr(qname, stmt.rhs), VarPtr(qname, stmt.lhs), EDGE_ASSIGN, stmt.label
                    )
                elif isinstance(stmt, Load):
                    for obj in list(pt[VarPtr(qname, stmt.base)]):
                        changed |= edge(
                            FieldPtr(obj, stmt.field),
                            VarPtr(qname, stmt.lhs),
                            EDGE_LOAD,
                            stmt.label,
                        )
                elif isinstance(stmt, Store):
                    for obj in list(pt[VarPtr(qname, stmt.base)]):
                        changed |= edge(
                            VarPtr(qname, stmt.rhs),
                            FieldPtr(obj, stmt.field),
                            EDGE_STORE,
                            stmt.label,
                        )
                elif isinstance(stmt, Invoke):
                    targets = []
                    if stmt.is_virtual:
                        for obj in sorted(pt[VarPtr(qname, stmt.receiver or "")]):
                            type_name = program.type_of(obj)
                            callee = dispatch(program, type_name, stmt.method)
                            if callee is None:
                                diagnostics.add(
                                    dispatch_failure(stmt.label, type_name, stmt.method)
                                )
                                continue
                            if callee.arity != len(stmt.args):
                                diagnostics.add(arity_mismatch(stmt.label, callee.qname))
                                continue
                            changed |= add_pt(VarPtr(callee.qname, THIS), {obj})
                            targets.append(callee)
                    else:
                        callee = resolve_static(program, stmt.cls or "", stmt.method)
                        if callee is None:
                            diagnostics.add(
                                dispatch_failure(stmt.label, stmt.cls or "", stmt.method)
                            )
                        elif callee.arity != len(stmt.args):
                            diagnostics.add(arity_mismatch(stmt.label, callee.qname))
                        else:
                            targets.append(callee)
                    for callee in targets:
                        if (stmt.label, callee.qname) not in call_edges:
                            call_edges.add((stmt.label, callee.qname))
                            changed = True
                        if callee.qname not in reachable:
                            reachable.add(callee.qname)
                            changed = True
                        for k in range(1, callee.arity + 1):
                            changed |= edge(
                                VarPtr(qname, stmt.arg(k) or ""),
                                VarPtr(callee.qname, callee.param_at(k) or ""),
                                EDGE_PARAM,
                                stmt.label,
                            )
                        if stmt.lhs and callee.ret_var:
                            changed |= edge(
                                VarPtr(callee.qname, callee.ret_var),
                                VarPtr(qname, stmt.lhs),
                                EDGE_RETURN,
                                stmt.label,
                            )
        for source, target, _ in list(edges):
            if pt.get(source):
                changed |= add_pt(target, set(pt[source]))

    nodes: set[Pointer] = {ptr for ptr, objs in pt.items() if objs}
    for source, target, _ in edges:
        nodes.update((source, target))
    return AnalysisResult(
        pt={ptr: frozenset(objs) for ptr, objs in pt.items() if objs},
        edges=frozenset(PfgEdge(s, t, k, label) for (s, t, k), label in edges.items()),
        nodes=frozenset(nodes),
        call_edges=frozenset(call_edges),
        reachable=frozenset(reachable),
        diagnostics=tuple(sorted(diagnostics)),
    )


__all__ = ["naive_solve"]
