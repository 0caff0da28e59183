"""Utilities for profiling analysis runs."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator

import psutil
from loguru import logger

logger = logger.bind(module="profiler")

_process = psutil.Process()


@dataclass
class RunProfile:
    """Wall time and resident memory of one tagged run."""

    tag: str
    seconds: float = 0.0
    rss_mb: float = 0.0
    rss_delta_mb: float = 0.0


@dataclass
class ProfilerState:
    """Holds the profiles collected in this process."""

    runs: dict[str, RunProfile] = field(default_factory=dict)

    def columns(self, tag: str) -> dict[str, object]:
        run = self.runs.get(tag)
        if run is None:
            return {}
        return {"seconds": f"{run.seconds:.3f}", "rssMB": f"{run.rss_mb:.0f}"}


default_state = ProfilerState()


# _rss_mb routine
def _rss_mb() -> float:
    return _process.memory_info().rss / (1024 * 1024)


# profile_run routine
@contextmanager
def profile_run(tag: str, state: ProfilerState = default_state) -> Iterator[RunProfile]:
    """Time the enclosed block and record resident memory under ``tag``."""
    profile = RunProfile(tag)
    before = _rss_mb()
    start = time.perf_counter()
    try:
        yield profile
    finally:
        profile.seconds = time.perf_counter() - start
        profile.rss_mb = _rss_mb()
        profile.rss_delta_mb = profile.rss_mb - before
        state.runs[tag] = profile
        logger.debug(
            f"[Profiler] {tag} {profile.seconds:.3f}s, RAM: {profile.rss_mb:.0f}MB "
            f"({profile.rss_delta_mb:+.0f}MB)"
        )


__all__ = ["RunProfile", "ProfilerState", "default_state", "profile_run"]
