"""Utility package initialization and public exports."""

from .errors import error_payload

__all__ = ["error_payload"]
