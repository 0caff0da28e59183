import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.events import EDGE_RETURN, EDGE_STORE
from core.pfg import (
    FieldPtr,
    VarPtr,
    involved_methods,
    pfg_graph,
    pfg_reachable,
    result_document,
)
from core.solver import solve
from modules.analysis import dominance_violations, load_program, run_analysis
from modules.cutshortcut import CutShortcutPolicy, csc_policy

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"
STD = CORPUS / "stdlib" / "std.json"

PROGRAMS = sorted((CORPUS / "showcase").glob("*.ir")) + sorted((CORPUS / "cases").glob("*.ir"))


def _csc(rel: str, patterns=("field", "container", "local")):
    loaded = load_program(CORPUS / rel, model_path=STD)
    return loaded, run_analysis(loaded.program, "csc", patterns=patterns, model=loaded.model)


def _main(name: str) -> VarPtr:
    return VarPtr("Main.main", name)


def _shortcut_pairs(result) -> set[tuple[str, str]]:
    return {(str(e.source), str(e.target)) for e in result.shortcuts}


def test_carton_results_are_separated():
    _, result = _csc("showcase/carton.ir")
    assert result.var("Main.main", "result1") == {"o16"}
    assert result.var("Main.main", "result2") == {"o21"}
    assert result.field_of("o15", "item") == {"o16"}
    assert result.field_of("o20", "item") == {"o21"}


def test_carton_cut_and_shortcut_edges():
    _, result = _csc("showcase/carton.ir")
    assert _shortcut_pairs(result) == {
        ("Main.main:item1", "o15.item"),
        ("Main.main:item2", "o20.item"),
        ("o15.item", "Main.main:result1"),
        ("o20.item", "Main.main:result2"),
    }
    kinds = sorted(c.kind for c in result.cut_log)
    assert kinds == [EDGE_RETURN, EDGE_RETURN, EDGE_STORE, EDGE_STORE]


def test_nested_setter_lifts_store_to_allocation_caller():
    _, result = _csc("showcase/nested_setter.ir")
    assert result.field_of("o8", "f") == {"o7"}
    assert result.field_of("o10", "f") == {"o9"}
    assert ("Main.main:t1", "o8.f") in _shortcut_pairs(result)
    assert ("Main.main:t2", "o10.f") in _shortcut_pairs(result)


def test_select_shortcuts_arguments_to_result():
    _, result = _csc("showcase/select.ir")
    assert result.var("Main.main", "r1") == {"o10", "o11"}
    assert result.var("Main.main", "r2") == {"o14", "o15"}
    assert {
        ("Main.main:a1", "Main.main:r1"),
        ("Main.main:a2", "Main.main:r1"),
        ("Main.main:a3", "Main.main:r2"),
        ("Main.main:a4", "Main.main:r2"),
    } <= _shortcut_pairs(result)


def test_list_elements_connect_only_through_their_host():
    _, result = _csc("showcase/list_iter.ir")
    assert result.var("Main.main", "x") == {"o2"}
    assert result.var("Main.main", "y") == {"o7"}
    assert result.host_of(_main("l1")) == {"o1"}
    assert result.host_of(_main("it1")) == {"o1"}
    assert result.host_of(_main("it2")) == {"o6"}
    pairs = _shortcut_pairs(result)
    assert ("Main.main:a", "Main.main:x") in pairs
    assert ("Main.main:b", "Main.main:y") in pairs
    assert ("Main.main:a", "Main.main:y") not in pairs
    assert ("Main.main:b", "Main.main:x") not in pairs


def test_plain_pointer_has_no_host():
    _, result = _csc("showcase/list_iter.ir")
    assert result.host_of(_main("a")) == frozenset()


def test_mixed_return_is_relayed_to_callers():
    _, result = _csc("cases/mixed_return_relay.ir")
    assert result.var("Main.main", "g1") == {"md1", "md2", "mp1"}
    assert result.var("Main.main", "g2") == {"md1", "md2", "mp2"}
    relays = {e for e in result.shortcuts if e.provenance == "relay"}
    assert {str(e.source) for e in relays} == {"Cell.getOr:q"}


def test_lifted_store_respects_receiver_dispatch():
    _, result = _csc("cases/virtual_override.ir")
    assert result.field_of("vx", "a") == {"ve1"}
    assert result.field_of("vy", "b") == {"ve1", "ve2"}
    assert result.field_of("vy", "a") == frozenset()


def test_no_patterns_equals_context_insensitive():
    loaded = load_program(CORPUS / "showcase" / "list_iter.ir", model_path=STD)
    plain = solve(loaded.program)
    bare = solve(loaded.program, csc_policy(loaded.program, [], loaded.model))
    assert result_document(bare) == result_document(plain)


def test_container_pattern_needs_a_model():
    loaded = load_program(CORPUS / "showcase" / "carton.ir")
    policy = CutShortcutPolicy(loaded.program, ["container", "local"], None)
    assert policy.enabled == {"local"}


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_shortcuts_follow_existing_flows(path):
    loaded = load_program(path, model_path=STD)
    ci = solve(loaded.program)
    graph = pfg_graph(ci)
    csc = run_analysis(loaded.program, "csc", model=loaded.model)
    for edge in csc.shortcuts:
        assert pfg_reachable(ci, edge.source, edge.target, graph), edge


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_cut_shortcut_never_loses_precision(path):
    loaded = load_program(path, model_path=STD)
    ci = solve(loaded.program)
    csc = run_analysis(loaded.program, "csc", model=loaded.model)
    assert dominance_violations(csc, ci) == []


def test_field_ptr_results_are_queryable():
    _, result = _csc("showcase/carton.ir", patterns=("field",))
    assert result.points_to(FieldPtr("o15", "item")) == {"o16"}


def test_involved_methods_of_carton():
    loaded, result = _csc("showcase/carton.ir")
    owners = {site.label: site.method for site in loaded.program.alloc_sites()}
    assert involved_methods(result, owners) == {"Main.main", "Carton.setItem", "Carton.getItem"}
    assert involved_methods(solve(loaded.program), owners) == set()
