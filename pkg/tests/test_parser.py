import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.ir import RET_VAR, Assign, BranchNondet, Invoke, New, Return, Store
from core.parser import link_programs, parse_program, print_program
from utils.errors import IRReferenceError, IRSyntaxError

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"


def _read(rel: str) -> str:
    return (CORPUS / rel).read_text(encoding="utf-8")


def test_parse_carton_program():
    program = parse_program(_read("showcase/carton.ir"))
    names = [c.name for c in program.classes]
    assert names == ["Item", "Book", "Pen", "Carton", "Main"]
    carton = program.class_def("Carton")
    assert [m.name for m in carton.methods] == ["setItem", "getItem"]
    assert carton.fields == (("item", "Item"),)
    assert program.method("Main.main").static
    assert not program.method("Carton.setItem").static


def test_empty_class_has_no_methods():
    program = parse_program("class Empty {\n}\n")
    assert program.class_def("Empty").methods == ()


def test_unresolved_goto_names_label():
    text = "class Main {\n  method main() {\n    goto missing;\n  }\n}\n"
    with pytest.raises(IRReferenceError, match="missing"):
        parse_program(text)


def test_allocation_needs_label():
    text = (
        "class A {\n}\nclass Main {\n  method main() {\n    local x: A;\n"
        "    x = new A;\n  }\n}\n"
    )
    with pytest.raises(IRSyntaxError) as info:
        parse_program(text)
    assert info.value.line == 6
    assert "@label" in str(info.value)


def test_unexpected_character_reports_position():
    with pytest.raises(IRSyntaxError) as info:
        parse_program("class A {\n  field f: T?;\n}\n")
    assert (info.value.line, info.value.column) == (2, 13)


def test_duplicate_class_rejected():
    with pytest.raises(IRReferenceError, match="duplicate class"):
        parse_program("class A {\n}\nclass A {\n}\n")


def test_statement_forms_and_auto_labels():
    text = """
class A {
  field f: A;
  method m(this, p: A): A {
    return p;
  }
}
class Main {
  method main() {
    local x: A;
    local y: A;
    x = new A @o1;
    x.f = x;
    y = x.m(x) @call1;
    if * goto End;
    y = null;
    End:
    return;
  }
}
"""
    main = parse_program(text).method("Main.main")
    assert isinstance(main.body[0], New) and main.body[0].site == "o1"
    assert isinstance(main.body[1], Store) and main.body[1].label == "Main.main#1"
    call = main.body[2]
    assert isinstance(call, Invoke) and call.label == "call1" and call.is_virtual
    assert call.arg(0) == "x" and call.arg(1) == "x"
    assert isinstance(main.body[3], BranchNondet)
    assert isinstance(main.body[4], Assign) and main.body[4].rhs is None
    assert isinstance(main.body[5], Return)
    assert main.target_index("End") == 5


def test_static_call_when_target_is_not_a_variable():
    program = parse_program(_read("showcase/select.ir"))
    main = program.method("Main.main")
    calls = [s for s in main.body if isinstance(s, Invoke)]
    assert all(c.kind == "static" and c.cls == "Main" for c in calls)
    assert program.method("Main.select").arity == 2


def test_distinct_return_variables_are_normalized():
    text = """
class Main {
  method pick(a: Object, b: Object): Object {
    if * goto Other;
    return a;
    Other:
    return b;
  }
  method main() {
  }
}
"""
    pick = parse_program(text).method("Main.pick")
    assert pick.ret_var == RET_VAR
    returns = [s for s in pick.body if isinstance(s, Return)]
    assert {r.var for r in returns} == {RET_VAR}
    assert pick.target_index("Other") == 3


def test_printer_output_reparses_to_same_program():
    program = parse_program(_read("showcase/select.ir"))
    again = parse_program(print_program(program))
    assert again == program
    assert print_program(again) == print_program(program)


def test_link_rejects_duplicate_classes():
    base = parse_program("class Main {\n  method main() {\n  }\n}\n")
    library = parse_program("class Main {\n}\n")
    with pytest.raises(IRReferenceError, match="duplicate class"):
        link_programs(base, [library])
