"""Expose command modules, one per CLI sub-command."""

__all__ = [
    "analyze",
    "interp",
    "check",
    "compare",
    "gen",
]
