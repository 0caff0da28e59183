"""Deterministic generator of stress programs over the bundled container library.

Each container unit allocates a list, adds an element and reads it back
(unit 0 through ``get``, later units through ``get`` or an iterator). Field
wrapper units store a value through a chain of ``depth`` nested setters
and read it back through a getter; local-flow units route two arguments
through a selecting static method. Every read is followed by a downcast
to the element's class so the clients see the precision difference.
"""

from __future__ import annotations

import random

from schemas.run_config import StressSpec

_ELEMENTS = ("Apple", "Brick", "Cloth", "Drum")


def _element_classes() -> list[str]:
    return [f"class {name} {{\n}}" for name in _ELEMENTS]


def _box_class(depth: int) -> str:
    lines = [
        "class Box {",
        "  field val: Object;",
        "  method init(this, v: Object) {",
        f"    this.set{depth}(v);",
        "  }",
    ]
    for level in range(depth, 0, -1):
        lines += [
            f"  method set{level}(this, v: Object) {{",
            f"    this.set{level - 1}(v);" if level > 1 else "    this.val = v;",
            "  }",
        ]
    lines += [
        "  method get(this): Object {",
        "    local r: Object;",
        "    r = this.val;",
        "    return r;",
        "  }",
        "}",
    ]
    return "\n".join(lines)


def _pick_method() -> list[str]:
    return [
        "  method pick(p: Object, q: Object): Object {",
        "    local r: Object;",
        "    if * goto Other;",
        "    r = p;",
        "    goto Done;",
        "    Other:",
        "    r = q;",
        "    Done:",
        "    return r;",
        "  }",
    ]


def generate(spec: StressSpec) -> str:
    """Return IR source for ``spec``; equal specs give equal bytes."""
    rng = random.Random(spec.seed)
    locals_: list[str] = []
    body: list[str] = []

    def local(name: str, typ: str) -> str:
        locals_.append(f"    local {name}: {typ};")
        return name

    for i in range(spec.n_containers):
        elem = rng.choice(_ELEMENTS)
        kind = rng.choice(("ArrayList", "LinkedList"))
        via_iterator = i > 0 and rng.random() < 0.5
        lst, e, x, c = (
            local(f"l{i}", "List"),
            local(f"e{i}", elem),
            local(f"x{i}", "Object"),
            local(f"c{i}", elem),
        )
        body += [
            f"    {lst} = new {kind} @c{i}_list;",
            f"    {e} = new {elem} @c{i}_elem;",
            f"    {lst}.add({e});",
        ]
        if via_iterator:
            it = local(f"it{i}", "Iterator")
            body += [f"    {it} = {lst}.iterator();", f"    {x} = {it}.next();"]
        else:
            body.append(f"    {x} = {lst}.get();")
        body.append(f"    {c} = ({elem}) {x};")

    for i in range(spec.n_field_wrappers):
        elem = rng.choice(_ELEMENTS)
        b, v, g, c = (
            local(f"b{i}", "Box"),
            local(f"v{i}", elem),
            local(f"g{i}", "Object"),
            local(f"d{i}", elem),
        )
        body += [
            f"    {b} = new Box @w{i}_box;",
            f"    {v} = new {elem} @w{i}_val;",
            f"    {b}.init({v});",
            f"    {g} = {b}.get();",
            f"    {c} = ({elem}) {g};",
        ]

    for i in range(spec.n_local_flows):
        elem = rng.choice(_ELEMENTS)
        p, q, r, c = (
            local(f"p{i}", elem),
            local(f"q{i}", elem),
            local(f"r{i}", "Object"),
            local(f"s{i}", elem),
        )
        body += [
            f"    {p} = new {elem} @f{i}_p;",
            f"    {q} = new {elem} @f{i}_q;",
            f"    {r} = Main.pick({p}, {q});",
            f"    {c} = ({elem}) {r};",
        ]

    parts = [f"// generated: {spec.model_dump_json()}"]
    parts += _element_classes()
    if spec.n_field_wrappers:
        parts.append(_box_class(spec.depth))
    main = ["class Main {", "  method main() {", *locals_, *body, "  }"]
    if spec.n_local_flows:
        main += _pick_method()
    main.append("}")
    parts.append("\n".join(main))
    return "\n".join(parts) + "\n"


__all__ = ["generate"]
