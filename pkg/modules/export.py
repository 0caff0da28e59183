"""Helpers for exporting results to DOT, CSV and XLSX."""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Sequence

import graphviz
from loguru import logger

from core.events import EDGE_SHORTCUT
from core.pfg import AnalysisResult, PfgEdge, cut_edges, sorted_pointers

logger = logger.bind(module="export")

SHORTCUT_STYLE = {"color": "blue", "style": "bold"}
CUT_STYLE = {"color": "red", "style": "dashed"}


# export_dot routine
def export_dot(result: AnalysisResult, name: str = "pfg") -> str:
    """Render the PFG as DOT source.

    Shortcut edges are drawn blue and bold, suppressed edges from the cut
    log red and dashed. Node ids are positional so pointer names never
    collide with DOT port syntax.
    """

    cuts = cut_edges(result)
    pointers = set(result.nodes)
    for cut in cuts:
        pointers.update((cut.source, cut.target))
    ids = {ptr: f"n{i}" for i, ptr in enumerate(sorted_pointers(pointers))}

    dot = graphviz.Digraph(name=name)
    dot.attr("node", shape="box", fontname="monospace")
    for ptr, node_id in ids.items():
        dot.node(node_id, label=str(ptr))
    for edge in sorted(result.edges, key=PfgEdge.sort_key):
        attrs = SHORTCUT_STYLE if edge.kind == EDGE_SHORTCUT else {}
        dot.edge(ids[edge.source], ids[edge.target], label=edge.kind, **attrs)
    for cut in cuts:
        dot.edge(ids[cut.source], ids[cut.target], label=cut.kind, **CUT_STYLE)
    return dot.source


# export_csv routine
def export_csv(
    header: Sequence[str], rows: Sequence[Sequence[object]], path: Path | None = None
) -> str:
    """Render rows as CSV text, also writing it to ``path`` when given."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    text = output.getvalue()
    if path is not None:
        path.write_text(text, encoding="utf-8")
    return text


# export_excel routine
def export_excel(
    header: Sequence[str],
    rows: Sequence[Sequence[object]],
    path: Path,
    sheet: str = "metrics",
) -> Path:
    """Write rows to an XLSX workbook with a bold header row."""
    from openpyxl import Workbook
    from openpyxl.styles import Font

    wb = Workbook()
    ws = wb.active
    ws.title = sheet
    ws.append(list(header))
    for cell in ws[1]:
        cell.font = Font(bold=True)
    for row in rows:
        ws.append(list(row))
    for column in ws.columns:
        width = max(len(str(cell.value or "")) for cell in column)
        ws.column_dimensions[column[0].column_letter].width = width + 2
    wb.save(path)
    logger.info("Wrote workbook", path=str(path), rows=len(rows))
    return path


__all__ = ["export_dot", "export_csv", "export_excel", "SHORTCUT_STYLE", "CUT_STYLE"]
