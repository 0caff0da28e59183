import json
import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.parser import parse_program
from core.pfg import FieldPtr, VarPtr, pfg_reachable, serialize_result
from core.solver import solve
from modules.analysis import load_program

ROOT = pathlib.Path(__file__).resolve().parents[1]
CORPUS = ROOT / "corpus"
STD = CORPUS / "stdlib" / "std.json"


def _showcase(name: str):
    return parse_program((CORPUS / "showcase" / name).read_text(encoding="utf-8"))


def test_carton_results_merge_without_cuts():
    result = solve(_showcase("carton.ir"))
    assert result.var("Main.main", "result1") == {"o16", "o21"}
    assert result.var("Main.main", "result2") == {"o16", "o21"}
    assert result.field_of("o15", "item") == {"o16", "o21"}
    assert result.reachable == {"Main.main", "Carton.setItem", "Carton.getItem"}
    assert not result.shortcuts and not result.cut_log


def test_assign_chain():
    program = parse_program(
        "class A {\n}\nclass Main {\n  method main() {\n    local x: A;\n    local y: A;\n"
        "    x = new A @o1;\n    y = x;\n  }\n}\n"
    )
    assert solve(program).var("Main.main", "y") == {"o1"}


def test_list_reads_merge_without_cuts():
    loaded = load_program(CORPUS / "showcase" / "list_iter.ir", model_path=STD)
    result = solve(loaded.program)
    assert result.var("Main.main", "x") == {"o2", "o7"}
    assert result.var("Main.main", "y") == {"o2", "o7"}


def test_subset_propagation_holds_on_every_edge():
    result = solve(_showcase("nested_setter.ir"))
    for edge in result.edges:
        assert result.points_to(edge.source) <= result.points_to(edge.target)


def test_call_edges_and_reachability():
    result = solve(_showcase("nested_setter.ir"))
    callees = {callee for _, callee in result.call_edges}
    assert callees == {"A.init", "A.set", "A.getF"}
    assert result.var("A.set", "this") == {"o8", "o10"}


def test_pfg_reachability():
    result = solve(_showcase("carton.ir"))
    item1 = VarPtr("Main.main", "item1")
    assert pfg_reachable(result, item1, FieldPtr("o15", "item"))
    assert pfg_reachable(result, item1, item1)
    assert not pfg_reachable(result, FieldPtr("o15", "item"), item1)
    with pytest.raises(KeyError):
        pfg_reachable(result, VarPtr("Main.main", "ghost"), item1)


def test_disconnected_chains_are_unreachable():
    program = parse_program(
        "class A {\n}\nclass Main {\n  method main() {\n    local x: A;\n    local y: A;\n"
        "    local u: A;\n    local v: A;\n    x = new A @o1;\n    y = x;\n"
        "    u = new A @o2;\n    v = u;\n  }\n}\n"
    )
    result = solve(program)
    assert not pfg_reachable(result, VarPtr("Main.main", "x"), VarPtr("Main.main", "v"))


def test_dispatch_failure_is_a_diagnostic():
    program = parse_program(
        "class A {\n  method m(this) {\n  }\n}\nclass B {\n}\nclass Main {\n  method main() {\n"
        "    local x: Object;\n    local a: A;\n    a = new A @o1;\n    x = new B @o2;\n"
        "    x.m() @call;\n  }\n}\n"
    )
    result = solve(program)
    assert result.diagnostics == ("dispatch-failure: call B.m",)
    assert ("call", "A.m") not in result.call_edges


def test_serialized_result_is_deterministic():
    first = serialize_result(solve(_showcase("select.ir")))
    assert first == serialize_result(solve(_showcase("select.ir")))
    doc = json.loads(first)
    assert set(doc) == {"pt", "callEdges", "reachable", "cutLog", "shortcuts", "diagnostics"}
    assert doc["pt"]["Main.main:r1"] == ["o10", "o11", "o14", "o15"]
