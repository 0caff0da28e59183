"""Application configuration and thresholds."""

from dataclasses import dataclass


@dataclass
class AnalysisThresholds:
    """Centralized interpreter budgets and scaling-trend ratios."""

    max_steps: int = 10_000
    max_paths: int = 1_000
    time_budget_secs: float = 60.0
    csc_time_ratio: float = 2.0
    kobj_time_ratio: float = 10.0


THRESHOLDS = AnalysisThresholds()

DEFAULT_CONFIG = {
    "entry": "Main.main",
    "analysis": "csc",
    "patterns": ["container", "field", "local"],
    "stdlib": "corpus/stdlib/std.json",
    "container_model": None,
    "max_steps": THRESHOLDS.max_steps,
    "max_paths": THRESHOLDS.max_paths,
    "time_budget_secs": THRESHOLDS.time_budget_secs,
    "workers": 4,
    "compare_analyses": ["ci", "csc", "kcfa:1", "kobj:2"],
    "csc_time_ratio": THRESHOLDS.csc_time_ratio,
    "kobj_time_ratio": THRESHOLDS.kobj_time_ratio,
}

# Global configuration object to share across modules. Settings loaded from
# ``config.json`` are injected at runtime by ``set_config``.
config = DEFAULT_CONFIG.copy()


# set_config routine
def set_config(cfg: dict) -> None:
    """Replace the global configuration with ``cfg`` on top of the defaults."""

    config.clear()
    config.update(DEFAULT_CONFIG)
    config.update(cfg)

    # Keep centralized thresholds in sync with overrides
    THRESHOLDS.max_steps = int(config.get("max_steps", THRESHOLDS.max_steps))
    THRESHOLDS.max_paths = int(config.get("max_paths", THRESHOLDS.max_paths))
    THRESHOLDS.time_budget_secs = float(
        config.get("time_budget_secs", THRESHOLDS.time_budget_secs)
    )
    THRESHOLDS.csc_time_ratio = float(
        config.get("csc_time_ratio", THRESHOLDS.csc_time_ratio)
    )
    THRESHOLDS.kobj_time_ratio = float(
        config.get("kobj_time_ratio", THRESHOLDS.kobj_time_ratio)
    )
