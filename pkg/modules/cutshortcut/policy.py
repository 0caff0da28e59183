"""Cut-shortcut edge policy.

The policy plugs into :class:`core.solver.Solver`. Cut sets are fixed up
front by :func:`compute_cuts`; during propagation the hooks below lift
store and load triples from callees to callers, place shortcut edges where
a triple can be lifted no further, relay flows that reach a cut return
variable by other means, and track which container objects each pointer is
about (its hosts) to connect container entrances with exits.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Iterable

from loguru import logger

from core.events import (
    ALL_PATTERNS,
    EDGE_LOAD,
    EDGE_RETURN,
    EDGE_SHORTCUT,
    PATTERN_CONTAINER,
    PATTERN_FIELD_STORE,
)
from core.ir import Invoke, Load, MethodDef, Program, Store, dispatch, free_params
from core.pfg import FieldPtr, PfgEdge, Pointer, VarPtr
from core.solver import EdgePolicy
from modules.cutshortcut.container_model import ContainerModel
from modules.cutshortcut.cuts import CutSets, compute_cuts, expand_patterns

logger = logger.bind(module="cutshortcut")

# Dispatch constraints: (method name, resolved target) pairs every base object
# must satisfy after a triple was lifted through a call receiver.
Filter = frozenset[tuple[str, str]]
_NO_FILTER: Filter = frozenset()


@dataclass(frozen=True)
class TempStore:
    """A potential ``base.field = source`` in ``method``."""

    method: str
    base: str
    field: str
    source: str
    filter: Filter = _NO_FILTER


@dataclass(frozen=True)
class TempLoad:
    """A potential ``to = base.field`` in ``method``."""

    method: str
    to: str
    base: str
    field: str
    filter: Filter = _NO_FILTER


class CutShortcutPolicy(EdgePolicy):
    name = "csc"

    def __init__(
        self,
        program: Program,
        patterns: Iterable[str] = ALL_PATTERNS,
        model: ContainerModel | None = None,
    ) -> None:
        self.program = program
        self.enabled = expand_patterns(patterns)
        if model is None:
            self.enabled = self.enabled - {PATTERN_CONTAINER}
        self.model = model or ContainerModel()
        self.cuts: CutSets = compute_cuts(program, self.enabled, model)
        self._free: dict[str, dict[str, int]] = {}
        # field stores
        self.temp_stores: set[TempStore] = set()
        self._liftable_stores: dict[str, list[TempStore]] = defaultdict(list)
        self._final_stores: dict[Pointer, list[TempStore]] = defaultdict(list)
        # field loads
        self.temp_loads: set[TempLoad] = set()
        self._load_anchors: dict[str, list[tuple[str, str, Filter]]] = defaultdict(list)
        self._loads_by_base: dict[Pointer, list[tuple[TempLoad, bool]]] = defaultdict(list)
        self.return_load_edges: set[tuple[Pointer, Pointer, str]] = set()
        self._relay_sources: dict[str, list[Pointer]] = defaultdict(list)
        # containers
        self._hosts: dict[Pointer, set[str]] = defaultdict(set)
        self._host_queue: deque[tuple[Pointer, frozenset[str]]] = deque()
        self._host_sites: dict[str, bool] = {}
        self._host_succ: dict[Pointer, list[Pointer]] = defaultdict(list)
        self._recv_calls: dict[Pointer, list[tuple[Invoke, MethodDef, MethodDef]]] = (
            defaultdict(list)
        )
        self.source_rel: dict[tuple[str, str], set[Pointer]] = defaultdict(set)
        self.target_rel: dict[tuple[str, str], set[Pointer]] = defaultdict(set)

    # Setup ----------------------------------------------------------------

    def bind(self, solver) -> None:
        super().bind(solver)
        for method in self.program.methods():
            for stmt in method.body:
                if isinstance(stmt, Store) and stmt.label in self.cuts.cut_stores:
                    seed = TempStore(method.qname, stmt.base, stmt.field, stmt.rhs)
                    self.temp_stores.add(seed)
                    self._liftable_stores[method.qname].append(seed)
                elif (
                    isinstance(stmt, Load)
                    and self.cuts.is_load_cut(method.qname)
                    and stmt.lhs == method.ret_var
                    and stmt.base in self.free(method)
                ):
                    self._load_anchors[method.qname].append(
                        (stmt.base, stmt.field, _NO_FILTER)
                    )

    def free(self, method: MethodDef) -> dict[str, int]:
        cached = self._free.get(method.qname)
        if cached is None:
            cached = self._free[method.qname] = free_params(method)
        return cached

    def accepts(self, obj: str, constraints: Filter) -> bool:
        if not constraints:
            return True
        type_name = self.program.type_of(obj)
        for name, target in constraints:
            found = dispatch(self.program, type_name, name)
            if found is None or found.qname != target:
                return False
        return True

    def emit(self, source: Pointer, target: Pointer, rule: str) -> None:
        self.solver.add_shortcut(source, target, rule)

    # Solver predicates ----------------------------------------------------

    def is_store_cut(self, stmt: Store) -> bool:
        return stmt.label in self.cuts.cut_stores

    def cut_return_tags(self, method: MethodDef) -> frozenset[str]:
        return self.cuts.tags(method.qname)

    def hosts(self) -> dict[Pointer, frozenset[str]]:
        return {ptr: frozenset(h) for ptr, h in self._hosts.items() if h}

    # Hooks ----------------------------------------------------------------

    def on_call_edge(self, call: Invoke, caller: MethodDef, callee: MethodDef) -> None:
        if PATTERN_FIELD_STORE in self.enabled:
            for triple in list(self._liftable_stores.get(callee.qname, ())):
                self._lift_store(triple, call, caller, callee)
        if call.lhs and self.cuts.is_load_cut(callee.qname):
            for anchor in list(self._load_anchors.get(callee.qname, ())):
                self._lift_load(anchor, call, caller, callee)
            target = VarPtr(caller.qname, call.lhs)
            for source in list(self._relay_sources.get(callee.qname, ())):
                self.emit(source, target, "relay")
        if call.lhs and callee.qname in self.cuts.local_flow:
            target = VarPtr(caller.qname, call.lhs)
            for k in sorted(self.cuts.local_flow[callee.qname]):
                arg = call.arg(k)
                if arg is not None:
                    self.emit(VarPtr(caller.qname, arg), target, "localFlow")
        if PATTERN_CONTAINER in self.enabled and call.is_virtual:
            receiver = VarPtr(caller.qname, call.receiver or "")
            self._recv_calls[receiver].append((call, caller, callee))
            hosts = self._hosts.get(receiver)
            if hosts:
                self._apply_hosts(call, caller, callee, frozenset(hosts))

    def on_points_to_delta(self, ptr: Pointer, delta: frozenset[str]) -> None:
        for triple in list(self._final_stores.get(ptr, ())):
            self._emit_store(triple, delta)
        for triple, marked in list(self._loads_by_base.get(ptr, ())):
            self._emit_load(triple, marked, delta)
        if PATTERN_CONTAINER in self.enabled:
            hosts = frozenset(o for o in delta if self._is_host(o))
            if hosts:
                self._host_queue.append((ptr, hosts))

    def on_load_edge(self, stmt: Load, method: MethodDef, source: Pointer, target: Pointer) -> None:
        if (
            self.cuts.is_load_cut(method.qname)
            and stmt.lhs == method.ret_var
            and stmt.base in self.free(method)
        ):
            self.return_load_edges.add((source, target, EDGE_LOAD))

    def on_edge_added(self, edge: PfgEdge) -> None:
        target = edge.target
        if (
            isinstance(target, VarPtr)
            and self.cuts.is_load_cut(target.method)
            and target.name == self.program.method(target.method).ret_var
            and edge.key not in self.return_load_edges
        ):
            self._relay(edge.source, target.method)
        if PATTERN_CONTAINER in self.enabled and not self._is_transfer_return(edge):
            self._host_succ[edge.source].append(target)
            hosts = self._hosts.get(edge.source)
            if hosts:
                self._host_queue.append((target, frozenset(hosts)))

    def has_pending(self) -> bool:
        return bool(self._host_queue)

    def flush(self) -> None:
        while self._host_queue:
            ptr, hosts = self._host_queue.popleft()
            current = self._hosts[ptr]
            delta = hosts - current
            if not delta:
                continue
            current.update(delta)
            for target in list(self._host_succ.get(ptr, ())):
                self._host_queue.append((target, frozenset(delta)))
            for call, caller, callee in list(self._recv_calls.get(ptr, ())):
                self._apply_hosts(call, caller, callee, frozenset(delta))

    # Field stores ---------------------------------------------------------

    def _lift_store(
        self, triple: TempStore, call: Invoke, caller: MethodDef, callee: MethodDef
    ) -> None:
        k_base = callee.param_index(triple.base)
        k_source = callee.param_index(triple.source)
        base = call.arg(k_base) if k_base is not None else None
        source = call.arg(k_source) if k_source is not None else None
        if base is None or source is None:
            return
        constraints = triple.filter
        if k_base == 0:
            constraints = constraints | {(call.method, callee.qname)}
        self._add_store(TempStore(caller.qname, base, triple.field, source, constraints), caller)

    def _add_store(self, triple: TempStore, method: MethodDef) -> None:
        if triple in self.temp_stores:
            return
        self.temp_stores.add(triple)
        free = self.free(method)
        if triple.base in free and free.get(triple.source, 0) >= 1:
            self._liftable_stores[method.qname].append(triple)
            for call, caller in self.solver.call_sites_of(method.qname):
                self._lift_store(triple, call, caller, method)
            return
        base = VarPtr(method.qname, triple.base)
        self._final_stores[base].append(triple)
        self._emit_store(triple, self.solver.points_to(base))

    def _emit_store(self, triple: TempStore, objs: Iterable[str]) -> None:
        source = VarPtr(triple.method, triple.source)
        for obj in sorted(objs):
            if self.accepts(obj, triple.filter):
                self.emit(source, FieldPtr(obj, triple.field), "shortcutStore")

    # Field loads ----------------------------------------------------------

    def _lift_load(
        self,
        anchor: tuple[str, str, Filter],
        call: Invoke,
        caller: MethodDef,
        callee: MethodDef,
    ) -> None:
        base_var, field_name, constraints = anchor
        k = callee.param_index(base_var)
        base = call.arg(k) if k is not None else None
        if base is None or call.lhs is None:
            return
        if k == 0:
            constraints = constraints | {(call.method, callee.qname)}
        self._add_load(TempLoad(caller.qname, call.lhs, base, field_name, constraints), caller)

    def _add_load(self, triple: TempLoad, method: MethodDef) -> None:
        if triple in self.temp_loads:
            return
        self.temp_loads.add(triple)
        anchored = (
            self.cuts.is_load_cut(method.qname)
            and triple.to == method.ret_var
            and triple.base in self.free(method)
        )
        base = VarPtr(method.qname, triple.base)
        self._loads_by_base[base].append((triple, anchored))
        self._emit_load(triple, anchored, self.solver.points_to(base))
        if anchored:
            anchor = (triple.base, triple.field, triple.filter)
            self._load_anchors[method.qname].append(anchor)
            for call, caller in self.solver.call_sites_of(method.qname):
                if call.lhs:
                    self._lift_load(anchor, call, caller, method)

    def _emit_load(self, triple: TempLoad, marked: bool, objs: Iterable[str]) -> None:
        target = VarPtr(triple.method, triple.to)
        for obj in sorted(objs):
            if not self.accepts(obj, triple.filter):
                continue
            source = FieldPtr(obj, triple.field)
            if marked:
                self.return_load_edges.add((source, target, EDGE_SHORTCUT))
            self.emit(source, target, "shortcutLoad")

    def _relay(self, source: Pointer, method: str) -> None:
        sources = self._relay_sources[method]
        if source in sources:
            return
        sources.append(source)
        for call, caller in self.solver.call_sites_of(method):
            if call.lhs:
                self.emit(source, VarPtr(caller.qname, call.lhs), "relay")

    # Containers -----------------------------------------------------------

    def _is_host(self, obj: str) -> bool:
        known = self._host_sites.get(obj)
        if known is None:
            known = self._host_sites[obj] = self.model.is_host_type(
                self.program, self.program.type_of(obj)
            )
        return known

    def _is_transfer_return(self, edge: PfgEdge) -> bool:
        return (
            edge.kind == EDGE_RETURN
            and isinstance(edge.source, VarPtr)
            and self.model.is_transfer(edge.source.method)
        )

    def _apply_hosts(
        self, call: Invoke, caller: MethodDef, callee: MethodDef, hosts: frozenset[str]
    ) -> None:
        for k, category in self.model.entrances_of(callee.qname):
            arg = call.arg(k)
            if arg is None:
                continue
            for host in sorted(hosts):
                self._add_source(host, category, VarPtr(caller.qname, arg))
        if call.lhs:
            lhs = VarPtr(caller.qname, call.lhs)
            for category in self.model.exit_categories(callee.qname):
                for host in sorted(hosts):
                    self._add_target(host, category, lhs)
            if self.model.is_transfer(callee.qname):
                self._host_queue.append((lhs, hosts))

    def _add_source(self, host: str, category: str, source: Pointer) -> None:
        sources = self.source_rel[(host, category)]
        if source in sources:
            return
        sources.add(source)
        for target in sorted(self.target_rel.get((host, category), ()), key=str):
            self.emit(source, target, "container")

    def _add_target(self, host: str, category: str, target: Pointer) -> None:
        targets = self.target_rel[(host, category)]
        if target in targets:
            return
        targets.add(target)
        for source in sorted(self.source_rel.get((host, category), ()), key=str):
            self.emit(source, target, "container")


def csc_policy(
    program: Program,
    patterns: Iterable[str] = ALL_PATTERNS,
    model: ContainerModel | None = None,
) -> CutShortcutPolicy:
    policy = CutShortcutPolicy(program, patterns, model)
    logger.debug("Built cut-shortcut policy", patterns=sorted(policy.enabled))
    return policy


__all__ = ["TempStore", "TempLoad", "CutShortcutPolicy", "csc_policy"]
