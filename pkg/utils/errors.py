"""Error types and standardized error payloads."""

from __future__ import annotations

from typing import Any, Mapping


class IRError(ValueError):
    """Base class for problems with IR source or its references."""


class IRSyntaxError(IRError):
    """Raised when IR text does not follow the grammar."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class IRReferenceError(IRError):
    """Raised for unresolved or duplicated labels, classes and variables."""


class ContainerModelError(ValueError):
    """Raised when a container model file fails validation."""


class ConfigError(ValueError):
    """Raised when configuration or command-line options are invalid."""


class AnalysisTimeout(RuntimeError):
    """Raised when an analysis exceeds its wall-clock budget."""

    def __init__(self, analysis: str, seconds: float) -> None:
        super().__init__(f"{analysis} exceeded its {seconds:g}s budget")
        self.analysis = analysis
        self.seconds = seconds


def error_payload(
    code: str,
    message: str,
    *,
    details: Mapping[str, Any] | None = None,
) -> dict[str, Any]:
    """Return a standardized error document.

    Args:
        code: Machine-readable error code.
        message: Human-readable error message.
        details: Optional additional information about the error.
    """

    payload: dict[str, Any] = {"ok": False, "code": code, "message": message}
    if details:
        payload["details"] = dict(details)
    return payload
