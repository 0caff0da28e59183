"""Pointer flow graph types and the immutable analysis result."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, Union

import networkx as nx

from core.events import EDGE_SHORTCUT


@dataclass(frozen=True)
class VarPtr:
    """A method-local variable."""

    method: str
    name: str

    def __str__(self) -> str:
        return f"{self.method}:{self.name}"


@dataclass(frozen=True)
class FieldPtr:
    """A field of an abstract object."""

    site: str
    field: str

    def __str__(self) -> str:
        return f"{self.site}.{self.field}"


Pointer = Union[VarPtr, FieldPtr]


def sort_key(ptr: Pointer) -> tuple[int, str, str]:
    """Canonical pointer order: variables first, then object fields."""
    if isinstance(ptr, VarPtr):
        return (0, ptr.method, ptr.name)
    return (1, ptr.site, ptr.field)


def sorted_pointers(pointers: Iterable[Pointer]) -> list[Pointer]:
    return sorted(pointers, key=sort_key)


@dataclass(frozen=True)
class PfgEdge:
    source: Pointer
    target: Pointer
    kind: str
    provenance: str = ""

    @property
    def key(self) -> tuple[Pointer, Pointer, str]:
        return (self.source, self.target, self.kind)

    def sort_key(self) -> tuple:
        return (sort_key(self.source), sort_key(self.target), self.kind, self.provenance)


@dataclass(frozen=True)
class CutRecord:
    """An edge the base rules would add but a cut suppressed."""

    source: Pointer
    target: Pointer
    kind: str
    rule: str

    def sort_key(self) -> tuple:
        return (sort_key(self.source), sort_key(self.target), self.kind, self.rule)


class PointsToSet:
    """Growing set of allocation-site labels with delta support."""

    __slots__ = ("_objs",)

    def __init__(self, objs: Iterable[str] = ()) -> None:
        self._objs: set[str] = set(objs)

    def add_all(self, objs: Iterable[str]) -> frozenset[str]:
        """Add ``objs`` and return only the labels that were new."""
        delta = frozenset(o for o in objs if o not in self._objs)
        self._objs.update(delta)
        return delta

    def __contains__(self, obj: object) -> bool:
        return obj in self._objs

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._objs))

    def __len__(self) -> int:
        return len(self._objs)

    def freeze(self) -> frozenset[str]:
        return frozenset(self._objs)


@dataclass(frozen=True)
class AnalysisResult:
    pt: Mapping[Pointer, frozenset[str]]
    edges: frozenset[PfgEdge]
    nodes: frozenset[Pointer]
    call_edges: frozenset[tuple[str, str]]
    reachable: frozenset[str]
    cut_log: frozenset[CutRecord] = frozenset()
    diagnostics: tuple[str, ...] = ()
    hosts: Mapping[Pointer, frozenset[str]] = field(default_factory=dict)

    def points_to(self, ptr: Pointer) -> frozenset[str]:
        return self.pt.get(ptr, frozenset())

    def var(self, method: str, name: str) -> frozenset[str]:
        return self.points_to(VarPtr(method, name))

    def field_of(self, site: str, field_name: str) -> frozenset[str]:
        return self.points_to(FieldPtr(site, field_name))

    def host_of(self, ptr: Pointer) -> frozenset[str]:
        return self.hosts.get(ptr, frozenset())

    @property
    def shortcuts(self) -> frozenset[PfgEdge]:
        return frozenset(e for e in self.edges if e.kind == EDGE_SHORTCUT)


def shortcut_edges(result: AnalysisResult) -> list[PfgEdge]:
    return sorted(result.shortcuts, key=PfgEdge.sort_key)


def cut_edges(result: AnalysisResult) -> list[CutRecord]:
    return sorted(result.cut_log, key=CutRecord.sort_key)


def involved_methods(result: AnalysisResult, owner_of_site: Mapping[str, str]) -> set[str]:
    """Methods owning an endpoint of any cut or shortcut edge.

    Object fields are attributed to the method that allocates the object.
    """

    def owner(ptr: Pointer) -> str | None:
        if isinstance(ptr, VarPtr):
            return ptr.method
        return owner_of_site.get(ptr.site)

    found: set[str] = set()
    for item in list(result.cut_log) + list(result.shortcuts):
        for ptr in (item.source, item.target):
            name = owner(ptr)
            if name:
                found.add(name)
    return found


def pfg_graph(result: AnalysisResult) -> nx.DiGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(result.nodes)
    graph.add_edges_from((e.source, e.target) for e in result.edges)
    return graph


def pfg_reachable(
    result: AnalysisResult,
    source: Pointer,
    target: Pointer,
    graph: nx.DiGraph | None = None,
) -> bool:
    """Return ``True`` when ``target`` is reachable from ``source`` in the PFG.

    Raises:
        KeyError: If either pointer is not a node of the result's PFG.
    """

    graph = graph if graph is not None else pfg_graph(result)
    for ptr in (source, target):
        if ptr not in graph:
            raise KeyError(f"unknown PFG node {ptr}")
    return nx.has_path(graph, source, target)


def result_document(result: AnalysisResult) -> dict[str, Any]:
    return {
        "pt": {
            str(ptr): sorted(objs)
            for ptr, objs in sorted(result.pt.items(), key=lambda kv: sort_key(kv[0]))
            if objs
        },
        "callEdges": sorted([site, method] for site, method in result.call_edges),
        "reachable": sorted(result.reachable),
        "cutLog": [
            {
                "source": str(c.source),
                "target": str(c.target),
                "kind": c.kind,
                "rule": c.rule,
            }
            for c in cut_edges(result)
        ],
        "shortcuts": [[str(e.source), str(e.target)] for e in shortcut_edges(result)],
        "diagnostics": sorted(result.diagnostics),
    }


def serialize_result(result: AnalysisResult) -> str:
    """Serialize ``result`` as deterministic sorted-key JSON."""
    return json.dumps(result_document(result), sort_keys=True, indent=2)


__all__ = [
    "VarPtr",
    "FieldPtr",
    "Pointer",
    "sort_key",
    "sorted_pointers",
    "PfgEdge",
    "CutRecord",
    "PointsToSet",
    "AnalysisResult",
    "shortcut_edges",
    "cut_edges",
    "involved_methods",
    "pfg_graph",
    "pfg_reachable",
    "result_document",
    "serialize_result",
]
