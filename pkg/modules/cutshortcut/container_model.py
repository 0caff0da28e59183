"""Container model: ENTRANCE, EXIT and TRANSFER methods plus root types.

The model file is JSON (see ``schemas/container_model.py``). Validation
against a program checks that every named method exists, entrance indices
are within arity and roots are declared classes. Methods of container
classes that the model leaves unclassified are reported as warnings, since
the container pattern is only sound when the model covers every way
elements enter a container.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from loguru import logger
from pydantic import ValidationError

from core.ir import Program, subtype_of
from schemas.container_model import ContainerModelFile
from utils.errors import ContainerModelError

logger = logger.bind(module="container_model")

# Methods exempt from the completeness warning
_UNMODELLED_OK = {"init"}


@dataclass(frozen=True)
class ContainerModel:
    entrances: frozenset[tuple[str, int, str]] = frozenset()
    exits: frozenset[tuple[str, str]] = frozenset()
    transfers: frozenset[str] = frozenset()
    collection_roots: frozenset[str] = frozenset()
    map_roots: frozenset[str] = frozenset()
    library: tuple[str, ...] = ()
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def entrances_of(self, method: str) -> list[tuple[int, str]]:
        return sorted((k, c) for m, k, c in self.entrances if m == method)

    def exit_categories(self, method: str) -> list[str]:
        return sorted(c for m, c in self.exits if m == method)

    def is_transfer(self, method: str) -> bool:
        return method in self.transfers

    @property
    def roots(self) -> frozenset[str]:
        return self.collection_roots | self.map_roots

    def is_host_type(self, program: Program, type_name: str) -> bool:
        """Return ``True`` for objects whose type is below a collection or map root."""
        return any(
            program.has_type(root) and subtype_of(program, type_name, root)
            for root in self.roots
        )


def load_container_model(text: str, program: Program | None = None) -> ContainerModel:
    """Parse and validate a container model document.

    Args:
        text: JSON text of the model file.
        program: When given, method names, indices and roots are resolved
            against it and completeness warnings are computed.

    Raises:
        ContainerModelError: On malformed JSON, schema violations or
            unresolved references.
    """

    try:
        raw = ContainerModelFile.model_validate(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ContainerModelError(f"invalid JSON: {exc}") from exc
    except ValidationError as exc:
        raise ContainerModelError(str(exc)) from exc

    model = ContainerModel(
        entrances=frozenset((r.method, r.param, r.category.value) for r in raw.entrances),
        exits=frozenset((r.method, r.category.value) for r in raw.exits),
        transfers=frozenset(raw.transfers),
        collection_roots=frozenset(raw.collection_roots),
        map_roots=frozenset(raw.map_roots),
        library=tuple(raw.library),
    )
    if program is None:
        return model
    return validate_model(model, program)


def validate_model(model: ContainerModel, program: Program) -> ContainerModel:
    """Resolve ``model`` against ``program`` and attach completeness warnings."""
    for root in sorted(model.roots):
        if program.class_def(root) is None:
            raise ContainerModelError(f"unknown root type {root!r}")

    def method_of(qname: str):
        if not program.has_method(qname):
            raise ContainerModelError(f"unknown method {qname!r}")
        method = program.method(qname)
        if method.static:
            raise ContainerModelError(f"container method {qname!r} must be an instance method")
        return method

    for qname, k, _ in sorted(model.entrances):
        method = method_of(qname)
        if not 1 <= k <= method.arity:
            raise ContainerModelError(
                f"parameter index {k} out of range for {qname!r} (arity {method.arity})"
            )
    for qname, _ in sorted(model.exits):
        if method_of(qname).ret_var is None:
            raise ContainerModelError(f"exit method {qname!r} returns nothing")
    for qname in sorted(model.transfers):
        method_of(qname)

    classified = (
        {m for m, _, _ in model.entrances} | {m for m, _ in model.exits} | set(model.transfers)
    )
    warnings: list[str] = []
    for cls in program.classes:
        if not model.is_host_type(program, cls.name):
            continue
        for method in cls.methods:
            if method.static or method.name in _UNMODELLED_OK:
                continue
            if method.qname not in classified:
                warnings.append(f"unclassified container method {method.qname}")
    for warning in warnings:
        logger.warning(warning)
    return ContainerModel(
        entrances=model.entrances,
        exits=model.exits,
        transfers=model.transfers,
        collection_roots=model.collection_roots,
        map_roots=model.map_roots,
        library=model.library,
        warnings=tuple(warnings),
    )


def library_paths(model: ContainerModel, model_path: Path) -> list[Path]:
    """Resolve the model's ``library`` entries relative to the model file."""
    return [(model_path.parent / entry).resolve() for entry in model.library]


__all__ = ["ContainerModel", "load_container_model", "validate_model", "library_paths"]
