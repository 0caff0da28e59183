import csv
import json
import pathlib
import re
import sys

import pytest
from openpyxl import load_workbook

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
import app
from modules.cutshortcut import CutShortcutPolicy
from modules.stress import generate
from schemas.run_config import StressSpec

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"
CARTON = str(CORPUS / "showcase" / "carton.ir")
LISTS = str(CORPUS / "showcase" / "list_iter.ir")
SELECT = str(CORPUS / "showcase" / "select.ir")


def _payloads(err: str) -> list[dict]:
    out = []
    for line in err.splitlines():
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(doc, dict) and doc.get("ok") is False:
            out.append(doc)
    return out


def _read(path: pathlib.Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def test_analyze_writes_report_and_dot(tmp_path):
    report, dot = tmp_path / "r.json", tmp_path / "pfg.dot"
    argv = ["analyze", CARTON, "--analysis", "csc", "--report", str(report), "--dot", str(dot)]
    status = app.main(argv)
    assert status == 0
    doc = _read(report)
    assert doc["pt"]["Main.main:result1"] == ["o16"]
    assert doc["metrics"]["failCast"] == 0
    assert dot.read_text(encoding="utf-8").startswith("digraph carton {")


def test_analyze_baseline_to_stdout(capsys):
    assert app.main(["analyze", CARTON, "--analysis", "ci"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pt"]["Main.main:result1"] == ["o16", "o21"]
    assert doc["ptH"] == {}


def test_analyze_context_sensitive(capsys):
    assert app.main(["analyze", LISTS, "--analysis", "kobj:2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pt"]["Main.main:x"] == ["o2"]


@pytest.mark.parametrize(
    "argv, code",
    [
        (["analyze", "missing.ir"], "input_error"),
        (["analyze", CARTON, "--analysis", "kcfa"], "config_error"),
        (["analyze", LISTS, "--no-stdlib"], "config_error"),
        (["analyze", CARTON, "--patterns", "field,array"], "config_error"),
        (["analyze", CARTON, "--container-model", "missing.json"], "input_error"),
    ],
)
def test_input_errors_exit_one(capsys, argv, code):
    assert app.main(argv) == 1
    payloads = _payloads(capsys.readouterr().err)
    assert [p["code"] for p in payloads] == [code]


def test_malformed_container_model(tmp_path, capsys):
    model = tmp_path / "model.json"
    model.write_text('{"sinks": []}', encoding="utf-8")
    assert app.main(["analyze", CARTON, "--container-model", str(model)]) == 1
    assert _payloads(capsys.readouterr().err)[0]["code"] == "container_model_error"


def test_usage_errors_exit_one():
    assert app.main(["frobnicate"]) == 1
    assert app.main([]) == 1


def test_patterns_without_container_need_no_model(capsys):
    argv = ["analyze", CARTON, "--no-stdlib", "--patterns", "field,local", "--no-field-load"]
    assert app.main(argv) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pt"]["Main.main:result1"] == ["o16", "o21"]


def test_check_passes_on_lists(tmp_path):
    report = tmp_path / "check.json"
    argv = ["check", LISTS, "--analysis", "ci", "--analysis", "csc", "--report", str(report)]
    assert app.main(argv) == 0
    doc = _read(report)
    assert doc["status"] == 0
    assert [run["analysis"] for run in doc["runs"]] == ["ci", "csc"]
    assert doc["runs"][1]["result"]["ptH"]["Main.main:it1"] == ["o1"]


def test_check_reports_select_results(tmp_path):
    report = tmp_path / "check.json"
    assert app.main(["check", SELECT, "--report", str(report)]) == 0
    run = _read(report)["runs"][0]
    assert run["result"]["pt"]["Main.main:r1"] == ["o10", "o11"]
    assert run["recall"]["recall"] == 1.0


def test_check_detects_a_dropped_container_flow(monkeypatch, tmp_path, capsys):
    real = CutShortcutPolicy.emit

    def _emit(self, source, target, rule):
        if rule != "container":
            real(self, source, target, rule)

    monkeypatch.setattr(CutShortcutPolicy, "emit", _emit)
    report = tmp_path / "check.json"
    assert app.main(["check", LISTS, "--report", str(report)]) == 3
    run = _read(report)["runs"][0]
    assert "pt Main.main:x -> o2" in run["recall"]["violations"]
    assert [p["code"] for p in _payloads(capsys.readouterr().err)] == ["recall_violation"]


def test_check_directory_with_seeds(tmp_path):
    report = tmp_path / "check.json"
    argv = [
        "check",
        str(CORPUS / "showcase"),
        "--seeds",
        str(CORPUS / "gen" / "seeds.json"),
        "--workers",
        "2",
        "--report",
        str(report),
    ]
    assert app.main(argv) == 0
    names = [run["program"] for run in _read(report)["runs"]]
    assert len(names) == 4 + 16
    assert names[-1] == "gen:seed=16"


def test_check_missing_input(capsys):
    assert app.main(["check", "no/such/dir"]) == 1
    assert _payloads(capsys.readouterr().err)[0]["code"] == "input_error"


def test_gen_is_reproducible(tmp_path, capsys):
    out = tmp_path / "g.ir"
    assert app.main(["gen", "--seed", "3", "--containers", "2", "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == generate(StressSpec(seed=3, n_containers=2))
    assert app.main(["gen", "--depth", "0"]) == 1


def test_compare_exports_tables(tmp_path):
    table, csv_path, xlsx = tmp_path / "t.txt", tmp_path / "t.csv", tmp_path / "t.xlsx"
    argv = [
        "compare",
        LISTS,
        "--analysis",
        "ci",
        "--analysis",
        "csc",
        "--timings",
        "--attribution",
        "--report",
        str(table),
        "--csv",
        str(csv_path),
        "--xlsx",
        str(xlsx),
    ]
    assert app.main(argv) == 0
    text = table.read_text(encoding="utf-8")
    assert "ci vs csc: failCast>" in text
    assert re.search(r"^csc: \d+ methods involved in cuts or shortcuts$", text, re.M)
    assert "ci: " not in text
    assert "container" in text.split("\n\n")[-1]
    rows = list(csv.reader(csv_path.open(encoding="utf-8")))
    assert rows[0] == [
        "analysis",
        "failCast",
        "reachMtd",
        "polyCall",
        "callEdge",
        "rssMB",
        "seconds",
    ]
    assert [r[:2] for r in rows[1:]] == [["ci", "4"], ["csc", "0"]]
    assert load_workbook(xlsx).active["A3"].value == "csc"


def test_interp_prints_facts(tmp_path):
    out = tmp_path / "facts.json"
    assert app.main(["interp", SELECT, "--max-paths", "10", "--report", str(out)]) == 0
    doc = _read(out)
    assert doc["varPointsTo"]["Main.main:r2"] == ["o14", "o15"]
    assert doc["exhausted"] is False
