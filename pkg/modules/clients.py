"""Precision clients computed over an analysis result.

``failCast`` counts cast statements in reachable methods that may fail,
``polyCall`` counts virtual call sites resolved to two or more targets,
``callEdge`` and ``reachMtd`` are the sizes of the call graph and of the
reachable method set. Lower is more precise for all four.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from core.events import METRIC_NAMES
from core.ir import Program, subtype_of
from core.pfg import AnalysisResult, VarPtr


@dataclass(frozen=True)
class Metrics:
    fail_cast_sites: frozenset[str] = frozenset()
    poly_call_sites: frozenset[str] = frozenset()
    reach_mtd: int = 0
    call_edge: int = 0

    @property
    def fail_cast(self) -> int:
        return len(self.fail_cast_sites)

    @property
    def poly_call(self) -> int:
        return len(self.poly_call_sites)

    def value(self, name: str) -> int:
        return self.as_dict()[name]

    def as_dict(self) -> dict[str, int]:
        return {
            "failCast": self.fail_cast,
            "reachMtd": self.reach_mtd,
            "polyCall": self.poly_call,
            "callEdge": self.call_edge,
        }

    def document(self) -> dict[str, object]:
        doc: dict[str, object] = dict(self.as_dict())
        doc["failCastSites"] = sorted(self.fail_cast_sites)
        doc["polyCallSites"] = sorted(self.poly_call_sites)
        return doc


def compute_metrics(program: Program, result: AnalysisResult) -> Metrics:
    failing: set[str] = set()
    for method, cast in program.casts():
        if method.qname not in result.reachable:
            continue
        objs = result.points_to(VarPtr(method.qname, cast.rhs))
        if any(not subtype_of(program, program.type_of(o), cast.type) for o in objs):
            failing.add(cast.label)

    targets: dict[str, set[str]] = defaultdict(set)
    for label, callee in result.call_edges:
        targets[label].add(callee)
    poly = {
        site.label
        for site in program.call_sites()
        if site.stmt.is_virtual and len(targets.get(site.label, ())) >= 2
    }
    return Metrics(
        fail_cast_sites=frozenset(failing),
        poly_call_sites=frozenset(poly),
        reach_mtd=len(result.reachable),
        call_edge=len(result.call_edges),
    )


def _relation(a: int, b: int) -> str:
    if a < b:
        return "<"
    if a > b:
        return ">"
    return "="


@dataclass(frozen=True)
class Comparison:
    rows: tuple[tuple[str, Metrics], ...]
    # (row a, row b) -> metric -> "<" | "=" | ">"
    flags: Mapping[tuple[str, str], Mapping[str, str]] = field(default_factory=dict)

    def dominates(self, a: str, b: str) -> bool:
        """``True`` when row ``a`` is no worse than row ``b`` on every metric."""
        return all(rel != ">" for rel in self.flags[(a, b)].values())

    def strictly_better(self, a: str, b: str) -> bool:
        rel = self.flags[(a, b)]
        return self.dominates(a, b) and any(r == "<" for r in rel.values())


def compare_metrics(rows: Sequence[tuple[str, Metrics]]) -> Comparison:
    flags: dict[tuple[str, str], dict[str, str]] = {}
    for a, ma in rows:
        for b, mb in rows:
            if a == b:
                continue
            flags[(a, b)] = {
                name: _relation(ma.value(name), mb.value(name)) for name in METRIC_NAMES
            }
    return Comparison(tuple(rows), flags)


def table_rows(
    comparison: Comparison,
    extra: Mapping[str, Mapping[str, object]] | None = None,
) -> tuple[list[str], list[list[object]]]:
    """Header and body rows shared by the text, CSV and XLSX renderers."""
    extra = extra or {}
    extra_cols = sorted({col for cols in extra.values() for col in cols})
    header = ["analysis", *METRIC_NAMES, *extra_cols]
    body: list[list[object]] = []
    for name, metrics in comparison.rows:
        row: list[object] = [name, *(metrics.value(m) for m in METRIC_NAMES)]
        row.extend(extra.get(name, {}).get(col, "") for col in extra_cols)
        body.append(row)
    return header, body


def _align(header: list[str], body: list[list[object]]) -> list[str]:
    cells = [header] + [[str(c) for c in row] for row in body]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = []
    for n, row in enumerate(cells):
        first = row[0].ljust(widths[0])
        rest = [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join([first, *rest]).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return lines


def render_table(
    comparison: Comparison,
    extra: Mapping[str, Mapping[str, object]] | None = None,
) -> str:
    header, body = table_rows(comparison, extra)
    lines = _align(header, body)
    names = [name for name, _ in comparison.rows]
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            rel = comparison.flags[(a, b)]
            marks = " ".join(f"{m}{rel[m]}" for m in METRIC_NAMES)
            lines.append(f"{a} vs {b}: {marks}")
    return "\n".join(lines) + "\n"


def attribution(
    ci: Metrics,
    singles: Mapping[str, Metrics],
    full: Metrics,
) -> dict[str, dict[str, float | None]]:
    """Share of the full improvement over CI each single pattern achieves.

    ``None`` marks a metric where the full configuration does not improve
    on CI at all.
    """

    out: dict[str, dict[str, float | None]] = {}
    for pattern, metrics in sorted(singles.items()):
        shares: dict[str, float | None] = {}
        for name in METRIC_NAMES:
            total = ci.value(name) - full.value(name)
            gained = ci.value(name) - metrics.value(name)
            shares[name] = round(gained / total, 4) if total else None
        out[pattern] = shares
    return out


def render_attribution(shares: Mapping[str, Mapping[str, float | None]]) -> str:
    header = ["pattern", *METRIC_NAMES]
    body = [
        [pattern, *("-" if v is None else f"{v:.0%}" for v in (row[m] for m in METRIC_NAMES))]
        for pattern, row in shares.items()
    ]
    return "\n".join(_align(header, body)) + "\n"


__all__ = [
    "Metrics",
    "compute_metrics",
    "Comparison",
    "compare_metrics",
    "table_rows",
    "render_table",
    "attribution",
    "render_attribution",
]
