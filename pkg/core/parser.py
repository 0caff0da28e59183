"""Parser, canonical printer and linker for the IR text format.

Grammar sketch (line comments start with ``//``)::

    class C extends D {
      field f: T;
      method m(this, p: T): R {
        local x: T;
        x = new T @o1;      x = y;          x = null;
        x.f = y;            x = y.f;        x = (T) y;
        x = y.m(a, b);      y.m(a);         x = C.s(a);
        if * goto L;        goto L;         L: ;
        return x;
      }
    }

Every statement may end with an explicit ``@label`` (required for ``new``);
unlabelled statements are named ``Class.method#N`` after their index in the
normalized body.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from loguru import logger

from core.ir import (
    RET_VAR,
    THIS,
    Assign,
    BranchNondet,
    Cast,
    ClassDef,
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
from utils.errors import IRReferenceError, IRSyntaxError

logger = logger.bind(module="parser")

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*)"
    r"|(?P<id>[A-Za-z_$][A-Za-z0-9_$]*)|(?P<punct>[{}();:,.=*@])"
)

_KEYWORDS = {"class", "extends", "field", "method", "local", "new", "null"}


@dataclass(frozen=True)
class _Token:
    kind: str
    value: str
    line: int
    column: int


def _tokenize(text: str) -> Iterator[_Token]:
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise IRSyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = match.lastgroup or ""
        if kind == "nl":
            line += 1
            line_start = match.end()
        elif kind in ("id", "punct"):
            yield _Token(kind, match.group(), line, match.start() - line_start + 1)
        pos = match.end()
    yield _Token("eof", "", line, pos - line_start + 1)


@dataclass
class _RawInvoke:
    lhs: str | None
    target: str
    method: str
    args: tuple[str, ...]
    label: str


@dataclass
class _Entry:
    stmt: Stmt | _RawInvoke
    jump_labels: list[str] = field(default_factory=list)


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = list(_tokenize(text))
        self.pos = 0

    # Token helpers --------------------------------------------------------

    def peek(self, offset: int = 0) -> _Token:
        index = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[index]

    def advance(self) -> _Token:
        token = self.peek()
        self.pos += 1
        return token

    def error(self, message: str, token: _Token | None = None) -> IRSyntaxError:
        token = token or self.peek()
        return IRSyntaxError(message, token.line, token.column)

    def expect(self, value: str) -> _Token:
        token = self.peek()
        if token.value != value or token.kind == "eof":
            found = token.value or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")
        return self.advance()

    def expect_id(self) -> str:
        token = self.peek()
        if token.kind != "id":
            found = token.value or "end of input"
            raise self.error(f"expected identifier, found {found!r}")
        self.advance()
        return token.value

    def accept(self, value: str) -> bool:
        if self.peek().kind != "eof" and self.peek().value == value:
            self.pos += 1
            return True
        return False

    # Grammar --------------------------------------------------------------

    def program(self, entry: str) -> Program:
        classes: list[ClassDef] = []
        seen: set[str] = set()
        while self.peek().kind != "eof":
            token = self.peek()
            cls = self.class_def()
            if cls.name in seen:
                raise IRReferenceError(
                    f"{token.line}:{token.column}: duplicate class {cls.name!r}"
                )
            seen.add(cls.name)
            classes.append(cls)
        return Program(tuple(classes), entry)

    def class_def(self) -> ClassDef:
        self.expect("class")
        name = self.expect_id()
        superclass = self.expect_id() if self.accept("extends") else None
        self.expect("{")
        fields: list[tuple[str, str]] = []
        methods: list[MethodDef] = []
        while not self.accept("}"):
            if self.accept("field"):
                fname = self.expect_id()
                self.expect(":")
                fields.append((fname, self.expect_id()))
                self.expect(";")
            elif self.peek().value == "method":
                methods.append(self.method_def(name))
            else:
                raise self.error(f"expected 'field' or 'method', found {self.peek().value!r}")
        return ClassDef(name, superclass, tuple(fields), tuple(methods))

    def method_def(self, cls: str) -> MethodDef:
        self.expect("method")
        name = self.expect_id()
        self.expect("(")
        params: list[str] = []
        types: list[str | None] = []
        if not self.accept(")"):
            while True:
                pname = self.expect_id()
                ptype = self.expect_id() if pname != THIS and self.accept(":") else None
                params.append(pname)
                types.append(ptype)
                if self.accept(")"):
                    break
                self.expect(",")
        static = not params or params[0] != THIS
        if THIS in params[1:]:
            raise self.error(f"'this' must be the first parameter of {cls}.{name}")
        ret_type = self.expect_id() if self.accept(":") else None
        self.expect("{")
        local_vars: list[tuple[str, str | None]] = []
        entries: list[_Entry] = []
        pending: list[str] = []
        while not self.accept("}"):
            if self.peek().value == "local" and self.peek(1).kind == "id":
                self.advance()
                lname = self.expect_id()
                ltype = self.expect_id() if self.accept(":") else None
                self.expect(";")
                local_vars.append((lname, ltype))
                continue
            if self.peek().kind == "id" and self.peek(1).value == ":":
                pending.append(self.advance().value)
                self.advance()
                continue
            entries.append(_Entry(self.statement(), pending))
            pending = []
        if pending:
            raise self.error(f"label {pending[0]!r} must precede a statement")
        return _finish_method(cls, name, params, types, static, ret_type, local_vars, entries)

    def label_suffix(self) -> str:
        if self.accept("@"):
            return self.expect_id()
        return ""

    def statement(self) -> Stmt | _RawInvoke:
        token = self.peek()
        if self.accept(";"):
            return Nop("")
        if token.value == "if" and self.peek(1).value == "*":
            self.pos += 2
            self.expect("goto")
            target = self.expect_id()
            return self.end(BranchNondet(target, self.label_suffix()))
        if token.value == "goto" and self.peek(1).kind == "id":
            self.advance()
            target = self.expect_id()
            return self.end(Goto(target, self.label_suffix()))
        if token.value == "return" and self.peek(1).value not in ("=", "."):
            self.advance()
            var = self.expect_id() if self.peek().kind == "id" else None
            return self.end(Return(var, self.label_suffix()))
        first = self.expect_id()
        if self.accept("."):
            member = self.expect_id()
            if self.accept("="):
                rhs = self.expect_id()
                return self.end(Store(first, member, rhs, self.label_suffix()))
            args = self.arguments()
            return self.end(_RawInvoke(None, first, member, args, self.label_suffix()))
        self.expect("=")
        return self.assignment(first)

    def assignment(self, lhs: str) -> Stmt | _RawInvoke:
        if self.accept("new"):
            typ = self.expect_id()
            at = self.peek()
            if not self.accept("@"):
                raise self.error("allocation needs an '@label'", at)
            site = self.expect_id()
            return self.end(New(lhs, typ, site))
        if self.accept("null"):
            return self.end(Assign(lhs, None, self.label_suffix()))
        if self.accept("("):
            typ = self.expect_id()
            self.expect(")")
            rhs = self.expect_id()
            return self.end(Cast(lhs, typ, rhs, self.label_suffix()))
        source = self.expect_id()
        if self.accept("."):
            member = self.expect_id()
            if self.peek().value == "(":
                args = self.arguments()
                return self.end(_RawInvoke(lhs, source, member, args, self.label_suffix()))
            return self.end(Load(lhs, source, member, self.label_suffix()))
        return self.end(Assign(lhs, source, self.label_suffix()))

    def arguments(self) -> tuple[str, ...]:
        self.expect("(")
        args: list[str] = []
        if not self.accept(")"):
            while True:
                args.append(self.expect_id())
                if self.accept(")"):
                    break
                self.expect(",")
        return tuple(args)

    def end(self, stmt: Stmt | _RawInvoke) -> Stmt | _RawInvoke:
        self.expect(";")
        return stmt


# Internal helpers ---------------------------------------------------------


def _auto_label(cls: str, name: str, index: int) -> str:
    return f"{cls}.{name}#{index}"


def _resolve_invoke(raw: _RawInvoke, variables: set[str]) -> Invoke:
    if raw.target in variables:
        return Invoke(raw.lhs, raw.target, None, raw.method, raw.args, raw.label)
    return Invoke(raw.lhs, None, raw.target, raw.method, raw.args, raw.label)


def _finish_method(
    cls: str,
    name: str,
    params: list[str],
    types: list[str | None],
    static: bool,
    ret_type: str | None,
    local_vars: list[tuple[str, str | None]],
    entries: list[_Entry],
) -> MethodDef:
    """Normalize returns, assign labels and resolve jumps for one method body."""
    variables = set(params) | {lname for lname, _ in local_vars}
    ret_names = sorted(
        {e.stmt.var for e in entries if isinstance(e.stmt, Return) and e.stmt.var}
    )
    ret_var: str | None = ret_names[0] if len(ret_names) == 1 else None
    if len(ret_names) > 1:
        ret_var = RET_VAR
        if RET_VAR not in variables:
            local_vars.append((RET_VAR, ret_type))
            variables.add(RET_VAR)
        normalized: list[_Entry] = []
        for entry in entries:
            stmt = entry.stmt
            if isinstance(stmt, Return) and stmt.var and stmt.var != RET_VAR:
                normalized.append(_Entry(Assign(RET_VAR, stmt.var, ""), entry.jump_labels))
                normalized.append(_Entry(Return(RET_VAR, stmt.label)))
            else:
                normalized.append(entry)
        entries = normalized

    body: list[Stmt] = []
    targets: list[tuple[str, int]] = []
    seen_targets: set[str] = set()
    for index, entry in enumerate(entries):
        for jump in entry.jump_labels:
            if jump in seen_targets:
                raise IRReferenceError(f"duplicate label {jump!r} in {cls}.{name}")
            seen_targets.add(jump)
            targets.append((jump, index))
        stmt = entry.stmt
        if isinstance(stmt, _RawInvoke):
            stmt = _resolve_invoke(stmt, variables)
        if not stmt.label:
            stmt = replace(stmt, label=_auto_label(cls, name, index))
        body.append(stmt)
    for stmt in body:
        if isinstance(stmt, (BranchNondet, Goto)) and stmt.target not in seen_targets:
            raise IRReferenceError(
                f"unresolved label {stmt.target!r} in {cls}.{name}"
            )
    return MethodDef(
        cls=cls,
        name=name,
        params=tuple(params),
        param_types=tuple(types),
        static=static,
        locals=tuple(local_vars),
        body=tuple(body),
        ret_var=ret_var,
        ret_type=ret_type,
        jump_targets=tuple(targets),
    )


def parse_program(text: str, entry: str = "Main.main") -> Program:
    """Parse IR source text into a :class:`Program`.

    Raises:
        IRSyntaxError: On malformed input, with line and column.
        IRReferenceError: On duplicate or unresolved labels and duplicate classes.
    """

    program = _Parser(text).program(entry)
    logger.debug(
        "Parsed program",
        classes=len(program.classes),
        methods=sum(len(c.methods) for c in program.classes),
    )
    return program


# Printer ------------------------------------------------------------------


def _format_stmt(stmt: Stmt, auto: str) -> str:
    suffix = "" if stmt.label == auto else f" @{stmt.label}"
    if isinstance(stmt, New):
        return f"{stmt.lhs} = new {stmt.type} @{stmt.label};"
    if isinstance(stmt, Assign):
        return f"{stmt.lhs} = {stmt.rhs or 'null'}{suffix};"
    if isinstance(stmt, Store):
        return f"{stmt.base}.{stmt.field} = {stmt.rhs}{suffix};"
    if isinstance(stmt, Load):
        return f"{stmt.lhs} = {stmt.base}.{stmt.field}{suffix};"
    if isinstance(stmt, Invoke):
        target = stmt.receiver if stmt.receiver is not None else stmt.cls
        call = f"{target}.{stmt.method}({', '.join(stmt.args)})"
        lhs = f"{stmt.lhs} = " if stmt.lhs else ""
        return f"{lhs}{call}{suffix};"
    if isinstance(stmt, Cast):
        return f"{stmt.lhs} = ({stmt.type}) {stmt.rhs}{suffix};"
    if isinstance(stmt, Return):
        var = f" {stmt.var}" if stmt.var else ""
        return f"return{var}{suffix};"
    if isinstance(stmt, BranchNondet):
        return f"if * goto {stmt.target}{suffix};"
    if isinstance(stmt, Goto):
        return f"goto {stmt.target}{suffix};"
    return ";"


def _format_var(name: str, typ: str | None) -> str:
    return f"{name}: {typ}" if typ else name


def print_program(program: Program) -> str:
    """Render ``program`` in canonical form; ``parse_program`` inverts it."""
    lines: list[str] = []
    for cls in program.classes:
        extends = f" extends {cls.superclass}" if cls.superclass else ""
        lines.append(f"class {cls.name}{extends} {{")
        for fname, ftype in cls.fields:
            lines.append(f"  field {fname}: {ftype};")
        for method in cls.methods:
            params = ", ".join(
                _format_var(p, t) for p, t in zip(method.params, method.param_types)
            )
            ret = f": {method.ret_type}" if method.ret_type else ""
            lines.append(f"  method {method.name}({params}){ret} {{")
            for lname, ltype in method.locals:
                lines.append(f"    local {_format_var(lname, ltype)};")
            for index, stmt in enumerate(method.body):
                for jump, target in method.jump_targets:
                    if target == index:
                        lines.append(f"    {jump}:")
                auto = _auto_label(method.cls, method.name, index)
                lines.append(f"    {_format_stmt(stmt, auto)}")
            lines.append("  }")
        lines.append("}")
    return "\n".join(lines) + ("\n" if lines else "")


def link_programs(base: Program, libraries: Iterable[Program]) -> Program:
    """Merge library classes into ``base``, keeping the base entry.

    Raises:
        IRReferenceError: If a class or statement label is defined twice.
    """

    classes = list(base.classes)
    for library in libraries:
        classes.extend(library.classes)
    return Program(tuple(classes), base.entry)


__all__ = ["parse_program", "print_program", "link_programs"]
