import asyncio
import os
import pathlib
import shutil
import sys
import time

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
from config import THRESHOLDS
from modules.analysis import load_source, run_analysis
from modules.corpus import (
    EXIT_DOMINANCE,
    EXIT_INPUT,
    CheckOptions,
    check_corpus,
    check_path,
    corpus_files,
    exit_status,
    load_seeds,
)
from modules.stress import generate
from schemas.run_config import StressSpec
from utils.errors import AnalysisTimeout, IRError

CORPUS = pathlib.Path(__file__).resolve().parents[1] / "corpus"
STD = CORPUS / "stdlib" / "std.json"


def test_corpus_files_skip_the_container_library():
    files = corpus_files(CORPUS, STD)
    assert CORPUS / "showcase" / "carton.ir" in files
    assert all(p.name != "containers.ir" for p in files)
    single = CORPUS / "showcase" / "list_iter.ir"
    assert corpus_files(single, STD) == [single]


def test_whole_corpus_passes():
    options = CheckOptions(analyses=("ci", "csc", "kcfa:1", "kcfa:2", "kobj:2"), model_path=STD)
    outcomes = asyncio.run(check_corpus(corpus_files(CORPUS, STD), options, workers=4))
    failures = [(o.name, o.analysis, o.message) for o in outcomes if o.status]
    assert failures == []
    assert exit_status(outcomes) == 0


def test_seed_list_passes():
    specs = load_seeds(CORPUS / "gen" / "seeds.json")
    assert len(specs) == 16
    options = CheckOptions(analyses=("ci", "csc"), model_path=STD)
    outcomes = asyncio.run(check_corpus([], options, specs=specs, workers=2))
    assert len(outcomes) == 32
    assert exit_status(outcomes) == 0


def test_sidecar_expectations_are_reported(tmp_path):
    program = tmp_path / "select.ir"
    shutil.copy(CORPUS / "showcase" / "select.ir", program)
    (tmp_path / "select.expected.json").write_text(
        '{"csc": {"pt": {"Main.main:r1": ["o10"]}, "metrics": {"failCast": 0}}}',
        encoding="utf-8",
    )
    (outcome,) = check_path(program, CheckOptions(analyses=("csc",)))
    assert outcome.status == EXIT_DOMINANCE
    assert outcome.report["expected"]["mismatches"] == [
        "expected pt Main.main:r1 = ['o10'], got ['o10', 'o11']"
    ]


def test_malformed_sidecar_is_an_input_error(tmp_path):
    program = tmp_path / "carton.ir"
    shutil.copy(CORPUS / "showcase" / "carton.ir", program)
    (tmp_path / "carton.expected.json").write_text("{", encoding="utf-8")
    outcomes = check_path(program, CheckOptions(analyses=("ci", "csc")))
    assert [o.status for o in outcomes] == [EXIT_INPUT, EXIT_INPUT]


def test_unparsable_program_is_an_input_error(tmp_path):
    program = tmp_path / "broken.ir"
    program.write_text("class Main {\n  method main( {\n", encoding="utf-8")
    (outcome,) = check_path(program, CheckOptions())
    assert outcome.status == EXIT_INPUT and outcome.report == {}


def test_bad_seed_list_rejected(tmp_path):
    seeds = tmp_path / "seeds.json"
    seeds.write_text('[{"seed": 1, "depth": 0}]', encoding="utf-8")
    with pytest.raises(IRError):
        load_seeds(seeds)


def test_timeouts_are_skipped(monkeypatch):
    from modules import corpus

    real = corpus.run_analysis

    def _run(program, analysis, **kwargs):
        if analysis == "kobj:2":
            raise AnalysisTimeout("kobj:2", 0.1)
        return real(program, analysis, **kwargs)

    monkeypatch.setattr(corpus, "run_analysis", _run)
    outcomes = check_path(CORPUS / "showcase" / "carton.ir", CheckOptions(analyses=("kobj:2",)))
    assert outcomes[0].status == 0
    assert outcomes[0].report["skipped"] == "kobj:2 exceeded its 0.1s budget"


def _seconds(program, analysis, model, max_seconds=None) -> float:
    start = time.perf_counter()
    run_analysis(program, analysis, model=model, max_seconds=max_seconds)
    return time.perf_counter() - start


@pytest.mark.slow
@pytest.mark.skipif(not os.getenv("CSC_RUN_SLOW"), reason="set CSC_RUN_SLOW=1 to run")
def test_cut_shortcut_scales_like_the_baseline_while_kobj_does_not():
    for n in (50, 100, 200):
        spec = StressSpec(seed=n, n_containers=n, n_field_wrappers=n // 4, n_local_flows=n // 4)
        loaded = load_source(generate(spec), model_path=STD)
        ci = _seconds(loaded.program, "ci", loaded.model)
        csc = _seconds(loaded.program, "csc", loaded.model)
        assert csc <= THRESHOLDS.csc_time_ratio * ci + 0.5, n
    budget = THRESHOLDS.time_budget_secs
    try:
        kobj = _seconds(loaded.program, "kobj:2", loaded.model, max_seconds=budget)
    except AnalysisTimeout:
        return
    assert kobj >= THRESHOLDS.kobj_time_ratio * ci
