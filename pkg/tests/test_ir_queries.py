import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.ir import def_statements, dispatch, free_params, resolve_static, subtype_of
from core.parser import parse_program
from utils.errors import IRReferenceError

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"

HIERARCHY = """
class A {
  method m(this) {
  }
  method only(this) {
  }
  method make(): A {
    local a: A;
    a = new A @s1;
    return a;
  }
}
class B extends A {
  method m(this) {
  }
}
class C extends B {
}
class D {
}
class Main {
  method main() {
  }
}
"""


@pytest.fixture
def program():
    return parse_program(HIERARCHY)


def _showcase(name: str):
    return parse_program((CORPUS / "showcase" / name).read_text(encoding="utf-8"))


def test_dispatch_direct_inherited_and_override(program):
    assert dispatch(program, "A", "m").qname == "A.m"
    assert dispatch(program, "B", "m").qname == "B.m"
    assert dispatch(program, "C", "m").qname == "B.m"
    assert dispatch(program, "C", "only").qname == "A.only"
    assert dispatch(program, "D", "m") is None


def test_dispatch_skips_static_methods(program):
    assert dispatch(program, "A", "make") is None
    assert resolve_static(program, "C", "make").qname == "A.make"
    assert resolve_static(program, "Ghost", "make") is None


def test_subtype_relation(program):
    assert subtype_of(program, "A", "A")
    assert subtype_of(program, "C", "A")
    assert not subtype_of(program, "A", "B")
    assert not subtype_of(program, "D", "A")
    assert subtype_of(program, "D", "Object")
    with pytest.raises(IRReferenceError):
        subtype_of(program, "Ghost", "A")


def test_def_statements_of_parameter_is_empty():
    set_item = _showcase("carton.ir").method("Carton.setItem")
    assert def_statements(set_item, "item") == frozenset()


def test_def_statements_of_selected_variable():
    select = _showcase("select.ir").method("Main.select")
    assert def_statements(select, "r") == {"Main.select#1", "Main.select#3"}


def test_def_statements_single_allocation(program):
    assert def_statements(program.method("A.make"), "a") == {"s1"}
    with pytest.raises(IRReferenceError):
        def_statements(program.method("A.make"), "zz")


def test_free_params_indices():
    program = _showcase("carton.ir")
    assert free_params(program.method("Carton.setItem")) == {"this": 0, "item": 1}
    select = _showcase("select.ir").method("Main.select")
    assert free_params(select) == {"p1": 1, "p2": 2}


def test_program_site_queries():
    program = _showcase("carton.ir")
    assert program.type_of("o16") == "Book"
    assert {s.label for s in program.alloc_sites()} == {"o15", "o16", "o20", "o21"}
    assert [c.label for _, c in program.casts()] == ["probe_book", "probe_pen"]
    owners = {site.method for site in program.call_sites()}
    assert owners == {"Main.main"}
    assert program.owner("o15").qname == "Main.main"
    with pytest.raises(IRReferenceError):
        program.type_of("probe_book")
