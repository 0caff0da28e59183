import json
import pathlib
import sys

import pytest

sys.path.append(str(pathlib.Path(__file__).resolve().parents[1]))
import config
from core.config import CONFIG_DEFAULTS, DEFAULT_CONFIG_PATH, load_config
from schemas.run_config import RunConfig, parse_selector
from utils.errors import ConfigError

ROOT = pathlib.Path(__file__).resolve().parents[1]


def _write(tmp_path, data) -> pathlib.Path:
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_bundled_config_loads():
    data = load_config(DEFAULT_CONFIG_PATH)
    assert data["analysis"] == "csc"
    assert data["compare_analyses"] == ["ci", "csc", "kcfa:1", "kobj:2"]
    assert pathlib.Path(data["stdlib"]) == ROOT / "corpus" / "stdlib" / "std.json"


def test_missing_keys_take_defaults(tmp_path):
    data = load_config(_write(tmp_path, {"analysis": "kobj:2"}))
    assert data["analysis"] == "kobj:2"
    assert data["max_steps"] == CONFIG_DEFAULTS["max_steps"]


def test_relative_paths_resolve_against_config_dir(tmp_path):
    data = load_config(_write(tmp_path, {"container_model": "models/m.json"}))
    assert data["container_model"] == str((tmp_path / "models" / "m.json").resolve())


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("CSC_MAX_STEPS", "77")
    assert load_config(_write(tmp_path, {}))["max_steps"] == 77


def test_config_path_from_environment(monkeypatch, tmp_path):
    path = _write(tmp_path, {"entry": "App.start"})
    monkeypatch.setenv("CSC_CONFIG_PATH", str(path))
    assert load_config()["entry"] == "App.start"


@pytest.mark.parametrize(
    "data",
    [
        {"analysis": "kcfa"},
        {"patterns": ["field", "array"]},
        {"max_paths": 0},
        {"compare_analyses": ["ci", "type:1"]},
    ],
)
def test_invalid_values_rejected(tmp_path, data):
    with pytest.raises(ConfigError):
        load_config(_write(tmp_path, data))


def test_unreadable_files_rejected(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="object"):
        load_config(bad)


def test_set_config_syncs_thresholds():
    try:
        config.set_config({"max_steps": 42, "time_budget_secs": 5})
        assert config.THRESHOLDS.max_steps == 42
        assert config.THRESHOLDS.time_budget_secs == 5.0
    finally:
        config.set_config({})
    assert config.THRESHOLDS.max_steps == config.DEFAULT_CONFIG["max_steps"]


def test_selectors():
    assert parse_selector("kcfa:2") == ("kcfa", 2)
    assert parse_selector("ci") == ("ci", None)
    with pytest.raises(ValueError):
        parse_selector("kobj")


def test_container_pattern_needs_model():
    with pytest.raises(ValueError, match="container model"):
        RunConfig(input="x.ir", analysis="csc", patterns=["container"])
    assert RunConfig(input="x.ir", analysis="ci", patterns=["container"]).is_baseline
    assert RunConfig(input="x.ir", patterns=["field-store", "local"]).patterns == [
        "field-store",
        "local",
    ]
