import json
import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.parser import parse_program
from core.solver import solve
from modules.analysis import load_program, run_analysis
from modules.interp import (
    ALWAYS_OK,
    MAY_FAIL,
    Budget,
    DynamicFacts,
    check_recall,
    explore,
    serialize_facts,
)

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"
STD = CORPUS / "stdlib" / "std.json"

PROGRAMS = sorted((CORPUS / "showcase").glob("*.ir")) + sorted((CORPUS / "cases").glob("*.ir"))


def _showcase(name: str):
    return parse_program((CORPUS / "showcase" / name).read_text(encoding="utf-8"))


def test_carton_facts():
    facts = explore(_showcase("carton.ir"))
    assert facts.var("Main.main", "result1") == {"o16"}
    assert facts.var("Main.main", "result2") == {"o21"}
    assert facts.field_points_to[("o15", "item")] == {"o16"}
    assert facts.cast_outcomes == {"probe_book": ALWAYS_OK, "probe_pen": ALWAYS_OK}
    assert not facts.exhausted and facts.paths == 1


def test_both_branches_of_select_are_explored():
    facts = explore(_showcase("select.ir"))
    assert facts.var("Main.main", "r1") == {"o10", "o11"}
    assert facts.var("Main.main", "r2") == {"o14", "o15"}
    assert facts.paths == 4


def test_straight_line_program():
    program = parse_program(
        "class A {\n}\nclass Main {\n  method main() {\n    local x: A;\n"
        "    x = new A @o1;\n  }\n}\n"
    )
    facts = explore(program, Budget(max_steps=10, max_paths=10))
    assert facts.reach_methods == {"Main.main"}
    assert facts.var("Main.main", "x") == {"o1"}
    assert not facts.exhausted


def test_failing_cast_ends_path_and_is_recorded():
    program = parse_program(
        "class A {\n}\nclass B {\n}\nclass Main {\n  method main() {\n    local a: A;\n"
        "    local b: B;\n    a = new A @o1;\n    b = (B) a @bad;\n  }\n}\n"
    )
    facts = explore(program)
    assert facts.cast_outcomes == {"bad": MAY_FAIL}
    assert facts.var("Main.main", "b") == frozenset()


def test_null_dereference_ends_path():
    program = parse_program(
        "class A {\n  field f: A;\n}\nclass Main {\n  method main() {\n    local a: A;\n"
        "    local b: A;\n    a = null;\n    b = a.f;\n  }\n}\n"
    )
    facts = explore(program)
    assert facts.null_derefs == 1
    assert facts.var("Main.main", "b") == frozenset()


def test_budgets_set_exhausted():
    program = parse_program(
        "class Main {\n  method main() {\n    Top:\n    if * goto Top;\n  }\n}\n"
    )
    facts = explore(program, Budget(max_steps=50, max_paths=5))
    assert facts.exhausted
    assert facts.paths == 5
    with pytest.raises(ValueError):
        Budget(max_steps=0)


def test_recall_of_cut_shortcut_on_carton():
    program = _showcase("carton.ir")
    report = check_recall(explore(program), run_analysis(program, "csc"))
    assert report.ok and report.recall == 1.0


def test_deleted_call_edge_is_reported():
    program = _showcase("carton.ir")
    result = solve(program)
    broken = result.__class__(
        pt=result.pt,
        edges=result.edges,
        nodes=result.nodes,
        call_edges=result.call_edges - {("Main.main#2", "Carton.setItem")},
        reachable=result.reachable,
    )
    report = check_recall(explore(program), broken)
    assert report.violations == ("call-edge Main.main#2 -> Carton.setItem",)
    assert 0 < report.recall < 1


def test_empty_facts_have_full_recall():
    report = check_recall(DynamicFacts(), solve(_showcase("carton.ir")))
    assert report.recall == 1.0 and report.facts == 0


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_every_analysis_covers_dynamic_facts(path):
    loaded = load_program(path, model_path=STD)
    facts = explore(loaded.program)
    for analysis in ("ci", "csc", "kcfa:1", "kobj:2"):
        result = run_analysis(loaded.program, analysis, model=loaded.model)
        assert check_recall(facts, result).violations == (), analysis


def test_facts_serialize_deterministically():
    text = serialize_facts(explore(_showcase("select.ir")))
    assert text == serialize_facts(explore(_showcase("select.ir")))
    doc = json.loads(text)
    assert doc["varPointsTo"]["Main.main:r1"] == ["o10", "o11"]
    assert doc["exhausted"] is False
