import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from core.naive import naive_solve
from core.pfg import result_document
from core.solver import solve
from modules.analysis import load_program, load_source
from modules.stress import generate
from schemas.run_config import StressSpec

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"
STD = CORPUS / "stdlib" / "std.json"

PROGRAMS = sorted((CORPUS / "showcase").glob("*.ir")) + sorted((CORPUS / "cases").glob("*.ir"))


def _same(program) -> None:
    fast, slow = solve(program), naive_solve(program)
    assert result_document(fast) == result_document(slow)
    assert {e.key for e in fast.edges} == {e.key for e in slow.edges}


@pytest.mark.parametrize("path", PROGRAMS, ids=lambda p: p.stem)
def test_worklist_solver_matches_naive_iteration(path):
    _same(load_program(path, model_path=STD).program)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_generated_programs_match(seed):
    spec = StressSpec(seed=seed, n_containers=3, n_field_wrappers=2, n_local_flows=2, depth=2)
    _same(load_source(generate(spec), model_path=STD).program)
