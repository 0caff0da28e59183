"""Static well-formedness checks over a parsed :class:`Program`."""

from __future__ import annotations

from dataclasses import dataclass

from core.ir import (
    OBJECT,
    THIS,
    Assign,
    BranchNondet,
    Cast,
    Goto,
    Invoke,
    Load,
    MethodDef,
    New,
    Nop,
    Program,
    Return,
    Stmt,
    Store,
)


@dataclass(frozen=True, order=True)
class Diagnostic:
    code: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"{self.code} [{self.where}]: {self.message}"


def _used_vars(stmt: Stmt) -> list[str]:
    if isinstance(stmt, New):
        return [stmt.lhs]
    if isinstance(stmt, Assign):
        return [stmt.lhs] + ([stmt.rhs] if stmt.rhs else [])
    if isinstance(stmt, Store):
        return [stmt.base, stmt.rhs]
    if isinstance(stmt, Load):
        return [stmt.lhs, stmt.base]
    if isinstance(stmt, Invoke):
        used = [stmt.lhs] if stmt.lhs else []
        if stmt.receiver:
            used.append(stmt.receiver)
        return used + list(stmt.args)
    if isinstance(stmt, Cast):
        return [stmt.lhs, stmt.rhs]
    if isinstance(stmt, Return):
        return [stmt.var] if stmt.var else []
    if isinstance(stmt, (BranchNondet, Goto, Nop)):
        return []
    return []


class _Checker:
    def __init__(self, program: Program) -> None:
        self.program = program
        self.out: list[Diagnostic] = []
        self.all_fields = {
            fname for cls in program.classes for fname, _ in cls.fields
        }
        self.cyclic: set[str] = set()

    def report(self, code: str, where: str, message: str) -> None:
        self.out.append(Diagnostic(code, where, message))

    def type_known(self, name: str | None, where: str) -> None:
        if name is not None and not self.program.has_type(name):
            self.report("unresolved-type", where, f"unknown type {name!r}")

    # Class hierarchy ------------------------------------------------------

    def check_hierarchy(self) -> None:
        program = self.program
        for cls in program.classes:
            if cls.superclass is not None and not program.has_type(cls.superclass):
                self.report(
                    "unresolved-type", cls.name, f"unknown superclass {cls.superclass!r}"
                )
        for cls in program.classes:
            seen = [cls.name]
            current = cls.superclass
            while current is not None and program.class_def(current) is not None:
                if current in seen:
                    cycle = seen[seen.index(current):]
                    if cls.name == min(cycle):
                        self.report(
                            "cycle",
                            cls.name,
                            "inheritance cycle " + " -> ".join(cycle + [current]),
                        )
                    self.cyclic.update(cycle)
                    break
                seen.append(current)
                current = program.class_def(current).superclass

    def check_members(self) -> None:
        program = self.program
        for cls in program.classes:
            names: set[str] = set()
            for fname, ftype in cls.fields:
                if fname in names:
                    self.report("duplicate-field", cls.name, f"field {fname!r} declared twice")
                names.add(fname)
                self.type_known(ftype, f"{cls.name}.{fname}")
                if cls.name not in self.cyclic and cls.superclass:
                    if program.has_type(cls.superclass) and program.lookup_field(
                        cls.superclass, fname
                    ):
                        self.report(
                            "shadowed-field",
                            cls.name,
                            f"field {fname!r} shadows an inherited field",
                        )
            method_names: set[str] = set()
            for method in cls.methods:
                if method.name in method_names:
                    self.report(
                        "duplicate-method", method.qname, "overloading is not supported"
                    )
                method_names.add(method.name)

    # Method bodies --------------------------------------------------------

    def candidates(self, method: MethodDef, call: Invoke) -> list[MethodDef]:
        program = self.program
        receiver = call.receiver or ""
        declared = method.cls if receiver == THIS else method.declared_type(receiver)
        impls = program.implementations(call.method)
        if (
            declared is None
            or declared == OBJECT
            or program.class_def(declared) is None
            or declared in self.cyclic
        ):
            return impls
        related: list[MethodDef] = []
        for impl in impls:
            if impl.cls in self.cyclic:
                continue
            if declared in program.ancestors(impl.cls) or impl.cls in program.ancestors(
                declared
            ):
                related.append(impl)
        return related

    def check_call(self, method: MethodDef, call: Invoke) -> None:
        program = self.program
        if call.is_virtual:
            targets = self.candidates(method, call)
            if not targets:
                self.report(
                    "unresolved-method",
                    call.label,
                    f"no method {call.method!r} for receiver {call.receiver!r}",
                )
        else:
            cls = call.cls or ""
            if not program.has_type(cls):
                self.report("unresolved-type", call.label, f"unknown class {cls!r}")
                return
            target = next(
                (
                    program.class_def(a).method(call.method)
                    for a in program.ancestors(cls)
                    if program.class_def(a) is not None
                    and program.class_def(a).method(call.method) is not None
                ),
                None,
            )
            if target is None or not target.static:
                self.report(
                    "unresolved-method", call.label, f"no static method {cls}.{call.method}"
                )
                return
            targets = [target]
        # dispatch picks one target; reject only when no candidate accepts the arguments
        if targets and all(t.arity != len(call.args) for t in targets):
            target = targets[0]
            self.report(
                "arity",
                call.label,
                f"{target.qname} takes {target.arity} argument(s), given {len(call.args)}",
            )

    def check_method(self, method: MethodDef) -> None:
        where = method.qname
        declared: set[str] = set()
        for name in list(method.params) + [n for n, _ in method.locals]:
            if name in declared:
                self.report("duplicate-variable", where, f"variable {name!r} declared twice")
            declared.add(name)
        for ptype in method.param_types:
            self.type_known(ptype, where)
        for _, ltype in method.locals:
            self.type_known(ltype, where)
        self.type_known(method.ret_type, where)
        for stmt in method.body:
            for var in _used_vars(stmt):
                if var not in declared:
                    self.report(
                        "undeclared-variable", stmt.label, f"variable {var!r} is not declared"
                    )
            if isinstance(stmt, (New, Cast)):
                self.type_known(stmt.type, stmt.label)
            elif isinstance(stmt, (Load, Store)) and stmt.field not in self.all_fields:
                self.report("unresolved-field", stmt.label, f"unknown field {stmt.field!r}")
            elif isinstance(stmt, Invoke):
                self.check_call(method, stmt)

    def check_entry(self) -> None:
        program = self.program
        if not program.has_method(program.entry):
            self.report("entry", program.entry, "entry method does not exist")
            return
        if program.method(program.entry).arity != 0:
            self.report("entry", program.entry, "entry method must take no arguments")


def check_program(program: Program) -> list[Diagnostic]:
    """Return diagnostics for ``program``; an empty list means well-formed."""
    checker = _Checker(program)
    checker.check_hierarchy()
    checker.check_members()
    for method in program.methods():
        checker.check_method(method)
    checker.check_entry()
    return sorted(set(checker.out))


__all__ = ["Diagnostic", "check_program"]
