"""Mini object-oriented intermediate language.

The IR is a small Java-like language: single inheritance, instance and
static methods, fields, allocation sites with explicit labels and a
nondeterministic branch. Programs are immutable once built, so a single
:class:`Program` may be shared between concurrent analyses.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from utils.errors import IRReferenceError

OBJECT = "Object"
THIS = "this"
# Synthetic variable introduced when a method returns more than one variable
RET_VAR = "$ret"


@dataclass(frozen=True)
class New:
    lhs: str
    type: str
    label: str

    @property
    def site(self) -> str:
        return self.label


@dataclass(frozen=True)
class Assign:
    lhs: str
    rhs: str | None  # None is the null constant
    label: str


@dataclass(frozen=True)
class Store:
    base: str
    field: str
    rhs: str
    label: str


@dataclass(frozen=True)
class Load:
    lhs: str
    base: str
    field: str
    label: str


@dataclass(frozen=True)
class Invoke:
    lhs: str | None
    receiver: str | None  # set for virtual calls
    cls: str | None  # set for static calls
    method: str
    args: tuple[str, ...]
    label: str

    @property
    def kind(self) -> str:
        return "static" if self.receiver is None else "virtual"

    @property
    def is_virtual(self) -> bool:
        return self.receiver is not None

    def arg(self, k: int) -> str | None:
        """Return argument ``k``; index 0 is the receiver of a virtual call."""
        if k == 0:
            return self.receiver
        if 1 <= k <= len(self.args):
            return self.args[k - 1]
        return None


@dataclass(frozen=True)
class Cast:
    lhs: str
    type: str
    rhs: str
    label: str


@dataclass(frozen=True)
class Return:
    var: str | None
    label: str


@dataclass(frozen=True)
class BranchNondet:
    target: str
    label: str


@dataclass(frozen=True)
class Goto:
    target: str
    label: str


@dataclass(frozen=True)
class Nop:
    label: str


Stmt = Union[New, Assign, Store, Load, Invoke, Cast, Return, BranchNondet, Goto, Nop]
# Statement forms that define their ``lhs``
DEFINING = (New, Assign, Load, Invoke, Cast)


def defined_var(stmt: Stmt) -> str | None:
    """Return the variable a statement defines, if any."""
    if isinstance(stmt, DEFINING):
        return stmt.lhs
    return None


@dataclass(frozen=True)
class AllocSite:
    label: str
    type: str
    method: str


@dataclass(frozen=True)
class CallSite:
    label: str
    method: str
    stmt: Invoke

    @property
    def lhs(self) -> str | None:
        return self.stmt.lhs

    def arg(self, k: int) -> str | None:
        return self.stmt.arg(k)


@dataclass(frozen=True)
class MethodDef:
    cls: str
    name: str
    params: tuple[str, ...]
    param_types: tuple[str | None, ...]
    static: bool
    locals: tuple[tuple[str, str | None], ...]
    body: tuple[Stmt, ...]
    ret_var: str | None = None
    ret_type: str | None = None
    jump_targets: tuple[tuple[str, int], ...] = ()

    @property
    def qname(self) -> str:
        return f"{self.cls}.{self.name}"

    @property
    def arity(self) -> int:
        """Number of declared parameters, excluding the receiver."""
        return len(self.params) - (0 if self.static else 1)

    def param_at(self, k: int) -> str | None:
        """Return the parameter at index ``k`` (0 is ``this``)."""
        if self.static:
            if 1 <= k <= len(self.params):
                return self.params[k - 1]
            return None
        if 0 <= k < len(self.params):
            return self.params[k]
        return None

    def param_index(self, var: str) -> int | None:
        if var not in self.params:
            return None
        pos = self.params.index(var)
        return pos + 1 if self.static else pos

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.params) | frozenset(name for name, _ in self.locals)

    def declared_type(self, var: str) -> str | None:
        for name, typ in zip(self.params, self.param_types):
            if name == var:
                return typ
        for name, typ in self.locals:
            if name == var:
                return typ
        return None

    def target_index(self, name: str) -> int:
        for label, index in self.jump_targets:
            if label == name:
                return index
        raise IRReferenceError(f"unknown jump label {name!r} in {self.qname}")


@dataclass(frozen=True)
class ClassDef:
    name: str
    superclass: str | None
    fields: tuple[tuple[str, str], ...]
    methods: tuple[MethodDef, ...]

    def method(self, name: str) -> MethodDef | None:
        for method in self.methods:
            if method.name == name:
                return method
        return None


@dataclass(frozen=True)
class Program:
    classes: tuple[ClassDef, ...]
    entry: str = "Main.main"
    _class_map: dict[str, ClassDef] = field(
        init=False, repr=False, compare=False, hash=False
    )
    _method_map: dict[str, MethodDef] = field(
        init=False, repr=False, compare=False, hash=False
    )
    _owner: dict[str, MethodDef] = field(
        init=False, repr=False, compare=False, hash=False
    )
    _stmts: dict[str, Stmt] = field(init=False, repr=False, compare=False, hash=False)
    _dispatch: dict[tuple[str, str], MethodDef | None] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        class_map: dict[str, ClassDef] = {}
        method_map: dict[str, MethodDef] = {}
        owner: dict[str, MethodDef] = {}
        stmts: dict[str, Stmt] = {}
        for cls in self.classes:
            if cls.name in class_map or cls.name == OBJECT:
                raise IRReferenceError(f"duplicate class {cls.name!r}")
            class_map[cls.name] = cls
            for method in cls.methods:
                method_map.setdefault(method.qname, method)
                for stmt in method.body:
                    if stmt.label in stmts:
                        raise IRReferenceError(f"duplicate label {stmt.label!r}")
                    stmts[stmt.label] = stmt
                    owner[stmt.label] = method
        object.__setattr__(self, "_class_map", class_map)
        object.__setattr__(self, "_method_map", method_map)
        object.__setattr__(self, "_owner", owner)
        object.__setattr__(self, "_stmts", stmts)
        object.__setattr__(self, "_dispatch", {})

    # Type queries ---------------------------------------------------------

    def has_type(self, name: str) -> bool:
        return name == OBJECT or name in self._class_map

    def class_def(self, name: str) -> ClassDef | None:
        return self._class_map.get(name)

    def superclass(self, name: str) -> str | None:
        """Return the direct superclass; every class but ``Object`` has one."""
        if name == OBJECT:
            return None
        cls = self._class_map.get(name)
        if cls is None:
            raise IRReferenceError(f"unknown type {name!r}")
        return cls.superclass or OBJECT

    def ancestors(self, name: str) -> list[str]:
        """Return ``name`` followed by its superclasses, nearest first."""
        chain = [name]
        seen = {name}
        current = self.superclass(name)
        while current is not None and current not in seen:
            chain.append(current)
            seen.add(current)
            current = self.superclass(current) if self.has_type(current) else None
        return chain

    def lookup_field(self, name: str, field_name: str) -> str | None:
        """Return the declared type of ``field_name`` in ``name`` or an ancestor."""
        for ancestor in self.ancestors(name):
            cls = self._class_map.get(ancestor)
            if cls is None:
                continue
            for fname, ftype in cls.fields:
                if fname == field_name:
                    return ftype
        return None

    # Method and statement queries -----------------------------------------

    def methods(self) -> Iterator[MethodDef]:
        for cls in self.classes:
            yield from cls.methods

    def methods_of(self, name: str) -> tuple[MethodDef, ...]:
        cls = self._class_map.get(name)
        if cls is None:
            raise IRReferenceError(f"unknown class {name!r}")
        return cls.methods

    def has_method(self, qname: str) -> bool:
        return qname in self._method_map

    def method(self, qname: str) -> MethodDef:
        try:
            return self._method_map[qname]
        except KeyError:
            raise IRReferenceError(f"unknown method {qname!r}") from None

    def stmt(self, label: str) -> Stmt:
        try:
            return self._stmts[label]
        except KeyError:
            raise IRReferenceError(f"unknown statement label {label!r}") from None

    def owner(self, label: str) -> MethodDef:
        """Return the method enclosing the statement ``label``."""
        try:
            return self._owner[label]
        except KeyError:
            raise IRReferenceError(f"unknown statement label {label!r}") from None

    def type_of(self, site: str) -> str:
        stmt = self._stmts.get(site)
        if not isinstance(stmt, New):
            raise IRReferenceError(f"unknown allocation site {site!r}")
        return stmt.type

    def alloc_sites(self) -> list[AllocSite]:
        return [
            AllocSite(stmt.label, stmt.type, method.qname)
            for method in self.methods()
            for stmt in method.body
            if isinstance(stmt, New)
        ]

    def call_sites(self) -> list[CallSite]:
        return [
            CallSite(stmt.label, method.qname, stmt)
            for method in self.methods()
            for stmt in method.body
            if isinstance(stmt, Invoke)
        ]

    def casts(self) -> list[tuple[MethodDef, Cast]]:
        return [
            (method, stmt)
            for method in self.methods()
            for stmt in method.body
            if isinstance(stmt, Cast)
        ]

    def implementations(self, name: str) -> list[MethodDef]:
        """Return every instance method called ``name`` (class-hierarchy candidates)."""
        return [m for m in self.methods() if m.name == name and not m.static]


def dispatch(program: Program, type_name: str, method_name: str) -> MethodDef | None:
    """Resolve ``method_name`` on an object of ``type_name``.

    Walks from ``type_name`` up the superclass chain and returns the first
    instance method with that name, or ``None`` when no ancestor declares one.
    """

    key = (type_name, method_name)
    cache = program._dispatch
    if key in cache:
        return cache[key]
    found: MethodDef | None = None
    for ancestor in program.ancestors(type_name):
        cls = program.class_def(ancestor)
        if cls is None:
            continue
        candidate = cls.method(method_name)
        if candidate is not None and not candidate.static:
            found = candidate
            break
    cache[key] = found
    return found


def resolve_static(program: Program, cls: str, method_name: str) -> MethodDef | None:
    """Resolve a static call ``cls.method_name`` through the superclass chain."""
    if not program.has_type(cls):
        return None
    for ancestor in program.ancestors(cls):
        owner = program.class_def(ancestor)
        found = owner.method(method_name) if owner else None
        if found is not None and found.static:
            return found
    return None


def def_statements(method: MethodDef, var: str) -> frozenset[str]:
    """Return labels of the statements in ``method`` that define ``var``.

    Parameter binding at method entry is not a defining statement.

    Raises:
        IRReferenceError: If ``var`` is neither a parameter nor a local.
    """

    if var not in method.variables:
        raise IRReferenceError(f"unknown variable {var!r} in {method.qname}")
    return frozenset(
        stmt.label for stmt in method.body if defined_var(stmt) == var
    )


def subtype_of(program: Program, t1: str, t2: str) -> bool:
    """Return ``True`` when ``t1`` reaches ``t2`` by zero or more superclass steps."""
    for name in (t1, t2):
        if not program.has_type(name):
            raise IRReferenceError(f"unknown type {name!r}")
    return t2 in program.ancestors(t1)


def free_params(method: MethodDef) -> dict[str, int]:
    """Return parameters with no defining statement, mapped to their index."""
    defined = {defined_var(stmt) for stmt in method.body}
    result: dict[str, int] = {}
    for name in method.params:
        if name not in defined:
            index = method.param_index(name)
            if index is not None:
                result[name] = index
    return result


__all__ = [
    "OBJECT",
    "THIS",
    "RET_VAR",
    "New",
    "Assign",
    "Store",
    "Load",
    "Invoke",
    "Cast",
    "Return",
    "BranchNondet",
    "Goto",
    "Nop",
    "Stmt",
    "defined_var",
    "AllocSite",
    "CallSite",
    "MethodDef",
    "ClassDef",
    "Program",
    "dispatch",
    "resolve_static",
    "def_statements",
    "subtype_of",
    "free_params",
]
