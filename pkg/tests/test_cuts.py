import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.events import ALL_PATTERNS, TAG_CONTAINER, TAG_FIELD_LOAD, TAG_LOCAL_FLOW
from core.parser import parse_program
from modules.analysis import load_program
from modules.cutshortcut import compute_cuts, param_return_flow
from modules.cutshortcut.cuts import expand_patterns, load_bases

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"
STD = CORPUS / "stdlib" / "std.json"


def _load(rel: str):
    return parse_program((CORPUS / rel).read_text(encoding="utf-8"))


def test_expand_patterns():
    assert expand_patterns(["field"]) == {"field-store", "field-load"}
    assert expand_patterns(["field-store", "local"]) == {"field-store", "local"}
    with pytest.raises(ValueError, match="unknown pattern"):
        expand_patterns(["heap"])


def test_carton_cuts_setter_store_and_getter_return():
    cuts = compute_cuts(_load("showcase/carton.ir"), ALL_PATTERNS)
    assert cuts.cut_stores == {"Carton.setItem#0"}
    assert dict(cuts.cut_returns) == {"Carton.getItem": {TAG_FIELD_LOAD}}
    assert cuts.is_load_cut("Carton.getItem")


def test_store_of_redefined_value_is_not_cut():
    program = parse_program(
        """
class A {
  field f: A;
  method set(this, p: A) {
    p = new A @fresh;
    this.f = p;
  }
}
class Main {
  method main() {
  }
}
"""
    )
    assert compute_cuts(program, ALL_PATTERNS).cut_stores == frozenset()


def test_store_on_allocated_base_is_not_cut():
    cuts = compute_cuts(_load("cases/local_base.ir"), ALL_PATTERNS)
    assert cuts.cut_stores == frozenset()
    assert "Pair.make" not in cuts.cut_returns
    assert cuts.tags("Pair.first") == {TAG_FIELD_LOAD}


def test_selecting_method_is_local_flow_cut():
    cuts = compute_cuts(_load("showcase/select.ir"), ALL_PATTERNS)
    assert cuts.tags("Main.select") == {TAG_LOCAL_FLOW}
    assert cuts.local_flow["Main.select"] == {1, 2}


def test_param_return_flow_of_select():
    rel = param_return_flow(_load("showcase/select.ir").method("Main.select"))
    assert rel == {"p1": {1}, "p2": {2}, "r": {1, 2}}


def test_param_return_flow_blocked_by_load():
    getter = _load("showcase/carton.ir").method("Carton.getItem")
    assert "r" not in param_return_flow(getter)


def test_identity_method_relates_its_parameter():
    program = parse_program(
        "class Main {\n  method id(p: Object): Object {\n    return p;\n  }\n"
        "  method main() {\n  }\n}\n"
    )
    assert param_return_flow(program.method("Main.id")) == {"p": {1}}
    assert compute_cuts(program, ALL_PATTERNS).local_flow == {"Main.id": {1}}


def test_receiver_flow_is_not_local_flow_cut():
    program = _load("cases/returns_receiver.ir")
    assert param_return_flow(program.method("F.pick"))["r"] == {0, 1}
    assert compute_cuts(program, ALL_PATTERNS).cut_returns == {}


def test_load_bases_follow_delegating_getters():
    bases = load_bases(_load("cases/getter_chain.ir"))
    assert bases == {"Box.raw": {0}, "Box.get": {0}}


def test_disabled_patterns_cut_nothing():
    program = _load("showcase/carton.ir")
    assert compute_cuts(program, []).cut_stores == frozenset()
    only_store = compute_cuts(program, ["field-store"])
    assert only_store.cut_stores == {"Carton.setItem#0"}
    assert dict(only_store.cut_returns) == {}


def test_container_exits_cut_with_model():
    loaded = load_program(CORPUS / "showcase" / "list_iter.ir", model_path=STD)
    cuts = compute_cuts(loaded.program, ["container"], loaded.model)
    for qname, _ in loaded.model.exits:
        assert TAG_CONTAINER in cuts.tags(qname)
    assert cuts.cut_stores == frozenset()
