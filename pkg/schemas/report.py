"""Pydantic models for expected-results sidecar files."""

from __future__ import annotations

from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field, RootModel, field_validator

from schemas.run_config import parse_selector


class ExpectedAnalysis(BaseModel):
    """Exact points-to and host sets one analysis must produce."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    pt: Dict[str, List[str]] = Field(default_factory=dict)
    hosts: Dict[str, List[str]] = Field(default_factory=dict, alias="ptH")
    metrics: Dict[str, int] = Field(default_factory=dict)


class ExpectedResults(RootModel[Dict[str, ExpectedAnalysis]]):
    """Sidecar document keyed by analysis selector (``ci``, ``csc``, ``kobj:2``)."""

    @field_validator("root")
    @classmethod
    def check_keys(cls, v: Dict[str, ExpectedAnalysis]) -> Dict[str, ExpectedAnalysis]:
        for key in v:
            parse_selector(key)
        return v

    def for_analysis(self, selector: str) -> ExpectedAnalysis | None:
        return self.root.get(selector)
