"""Pydantic models for command runs, stress generation and the config file."""

from __future__ import annotations

import re
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, conint, field_validator, model_validator

from core.events import (
    ALL_PATTERNS,
    ANALYSIS_CI,
    ANALYSIS_CSC,
    PATTERN_CONTAINER,
    PATTERN_FIELD_LOAD,
    PATTERN_FIELD_STORE,
)

# "field" may also be given as its two halves
KNOWN_PATTERNS = ALL_PATTERNS | {PATTERN_FIELD_STORE, PATTERN_FIELD_LOAD}

_SELECTOR_RE = re.compile(r"^(ci|csc|kcfa:\d+|kobj:\d+)$")


def parse_selector(text: str) -> tuple[str, int | None]:
    """Split ``kobj:2`` into ``("kobj", 2)``; ``ci`` and ``csc`` carry no depth."""
    if not _SELECTOR_RE.match(text):
        raise ValueError(
            f"analysis must be one of ci, csc, kcfa:K or kobj:K, got {text!r}"
        )
    name, _, depth = text.partition(":")
    return name, int(depth) if depth else None


def _check_patterns(v: List[str]) -> List[str]:
    unknown = sorted(set(v) - KNOWN_PATTERNS)
    if unknown:
        raise ValueError(f"unknown pattern(s): {', '.join(unknown)}")
    return sorted(set(v))


class RunConfig(BaseModel):
    """One analysis run as requested on the command line."""

    model_config = ConfigDict(extra="forbid")

    input: Path
    analysis: str = ANALYSIS_CSC
    patterns: List[str] = Field(default_factory=lambda: sorted(ALL_PATTERNS))
    container_model: Optional[Path] = None
    entry: str = "Main.main"
    max_steps: conint(gt=0) = 10_000
    max_paths: conint(gt=0) = 1_000
    time_budget_secs: Optional[float] = Field(default=None, gt=0)
    report: Optional[Path] = None
    dot: Optional[Path] = None

    @field_validator("analysis")
    @classmethod
    def check_analysis(cls, v: str) -> str:
        parse_selector(v)
        return v

    @field_validator("patterns")
    @classmethod
    def check_patterns(cls, v: List[str]) -> List[str]:
        return _check_patterns(v)

    @model_validator(mode="after")
    def check_model(self) -> "RunConfig":
        if (
            self.analysis == ANALYSIS_CSC
            and PATTERN_CONTAINER in self.patterns
            and self.container_model is None
        ):
            raise ValueError(
                "the container pattern needs a container model (--container-model or --stdlib)"
            )
        return self

    @property
    def selector(self) -> tuple[str, int | None]:
        return parse_selector(self.analysis)

    @property
    def is_baseline(self) -> bool:
        return self.analysis == ANALYSIS_CI


class StressSpec(BaseModel):
    """Parameters of a generated stress program."""

    seed: int = 1
    n_containers: conint(ge=0) = 1
    n_field_wrappers: conint(ge=0) = 0
    n_local_flows: conint(ge=0) = 0
    depth: conint(ge=1) = 1


class ConfigFile(BaseModel):
    """Shape of ``config.json`` after defaults are applied."""

    model_config = ConfigDict(extra="allow")

    entry: str
    analysis: str
    patterns: List[str]
    stdlib: Optional[str] = None
    container_model: Optional[str] = None
    max_steps: conint(gt=0)
    max_paths: conint(gt=0)
    time_budget_secs: float = Field(gt=0)
    workers: conint(gt=0)
    compare_analyses: List[str]
    csc_time_ratio: float = Field(gt=0)
    kobj_time_ratio: float = Field(gt=0)

    @field_validator("analysis")
    @classmethod
    def check_analysis(cls, v: str) -> str:
        parse_selector(v)
        return v

    @field_validator("compare_analyses")
    @classmethod
    def check_compare(cls, v: List[str]) -> List[str]:
        for item in v:
            parse_selector(item)
        return v

    @field_validator("patterns")
    @classmethod
    def check_patterns(cls, v: List[str]) -> List[str]:
        return _check_patterns(v)
