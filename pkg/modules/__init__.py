"""Analyses built on the core solver: cut-shortcut, context-sensitive, interpreter, clients.

Submodules are imported directly; nothing is re-exported here."""

__all__: list[str] = []
