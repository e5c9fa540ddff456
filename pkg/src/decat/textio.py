"""Text file formats for schemas and instances, plus JSON helpers.

Schema files::

    # comment
    schema digraph {
      node V;
      node E;
      arrow s: E -> V;
      arrow t: E -> V;
      relation s.t = id@E;        # paths run left to right; id@N is empty
    }

Instance files::

    instance C3 : digraph {
      V = {v0, v1, v2};
      E = {e0, e1, e2};
      s = {e0 -> v0, e1 -> v1, e2 -> v2};
      t = {e0 -> v1, e1 -> v2, e2 -> v0};
    }

Files are UTF-8, ``#`` starts a line comment, and whitespace between
tokens is free.  Identifiers are ``[A-Za-z0-9_]+``; instance entries may
be omitted, in which case the carrier (or action) is empty.  Formatting an
instance whose element names fall outside the identifier charset raises;
canonically relabelled instances always format cleanly.
"""

from __future__ import annotations

import re
from typing import Callable, Mapping

from .core import Arrow, Instance, Morphism, Path, Schema

__all__ = [
    "FormatError",
    "parse_schema_text",
    "parse_instance_text",
    "detect_kind",
    "format_schema",
    "format_instance",
    "instance_to_jsonable",
    "instance_from_jsonable",
    "morphism_to_jsonable",
    "morphism_from_jsonable",
]

_IDENT = re.compile(r"[A-Za-z0-9_]+")


class FormatError(ValueError):
    def __init__(self, message: str, line: int, col: int, source: str = "<text>"):
        super().__init__(f"{source}:{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.source = source


_TOKEN = re.compile(r"->|[{}();:,=.@]|[A-Za-z0-9_]+|\S")


def _tokenize(text: str, source: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(line, pos)
            assert m is not None
            word = m.group()
            col = pos + 1
            if _IDENT.fullmatch(word):
                tokens.append(("IDENT", word, lineno, col))
            elif word in ("->", "{", "}", "(", ")", ";", ":", ",", "=", ".", "@"):
                tokens.append((word, word, lineno, col))
            else:
                raise FormatError(f"unexpected character {word!r}", lineno, col, source)
            pos = m.end()
    tokens.append(("EOF", "", text.count("\n") + 1, 1))
    return tokens


class _Reader:
    def __init__(self, text: str, source: str):
        self.tokens = _tokenize(text, source)
        self.source = source
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> str:
        tok = self.next()
        if tok[0] != kind:
            want = what or (kind if kind != "IDENT" else "an identifier")
            found = tok[1] or "end of file"
            raise FormatError(f"expected {want}, found {found!r}", tok[2], tok[3], self.source)
        return tok[1]

    def fail(self, message: str):
        tok = self.peek()
        raise FormatError(message, tok[2], tok[3], self.source)


def detect_kind(text: str, source: str = "<text>") -> str:
    """First keyword of the file: ``schema`` or ``instance``."""
    reader = _Reader(text, source)
    kind, word, line, col = reader.peek()
    if kind == "IDENT" and word in ("schema", "instance"):
        return word
    raise FormatError("file must start with 'schema' or 'instance'", line, col, source)


def _parse_path(r: _Reader) -> tuple[str | None, tuple[str, ...]]:
    """Either ``id@NODE`` (returns start, ()) or ``a.b.c`` (start unknown)."""
    first = r.expect("IDENT", "a path")
    if first == "id" and r.peek()[0] == "@":
        r.next()
        node = r.expect("IDENT", "a node name")
        return node, ()
    arrows = [first]
    while r.peek()[0] == ".":
        r.next()
        arrows.append(r.expect("IDENT", "an arrow name"))
    return None, tuple(arrows)


def parse_schema_text(text: str, source: str = "<text>") -> Schema:
    r = _Reader(text, source)
    keyword = r.expect("IDENT", "'schema'")
    if keyword != "schema":
        r.fail("expected a schema file")
    name = r.expect("IDENT", "the schema name")
    r.expect("{")
    nodes: list[str] = []
    arrows: list[Arrow] = []
    relations: list[tuple[Path, Path]] = []
    arrow_src: dict[str, str] = {}
    while r.peek()[0] != "}":
        head = r.expect("IDENT", "'node', 'arrow', or 'relation'")
        if head == "node":
            nodes.append(r.expect("IDENT", "a node name"))
        elif head == "arrow":
            a_name = r.expect("IDENT", "an arrow name")
            r.expect(":")
            src = r.expect("IDENT", "a source node")
            r.expect("->")
            tgt = r.expect("IDENT", "a target node")
            arrows.append(Arrow(a_name, src, tgt))
            arrow_src.setdefault(a_name, src)
        elif head == "relation":
            tok = r.peek()
            left_start, left_arrows = _parse_path(r)
            r.expect("=")
            right_start, right_arrows = _parse_path(r)
            def start_of(start, arrow_names):
                if start is not None:
                    return start
                first_arrow = arrow_names[0]
                if first_arrow not in arrow_src:
                    raise FormatError(
                        f"relation uses undeclared arrow {first_arrow!r}",
                        tok[2], tok[3], source,
                    )
                return arrow_src[first_arrow]
            left = Path(start_of(left_start, left_arrows), left_arrows)
            right = Path(start_of(right_start, right_arrows), right_arrows)
            relations.append((left, right))
        else:
            r.fail(f"unknown declaration {head!r}")
        r.expect(";")
    r.expect("}")
    r.expect("EOF", "end of file")
    return Schema(name, nodes, arrows, relations)


def parse_instance_text(
    text: str,
    resolve_schema: Callable[[str], Schema],
    source: str = "<text>",
) -> Instance:
    r = _Reader(text, source)
    keyword = r.expect("IDENT", "'instance'")
    if keyword != "instance":
        r.fail("expected an instance file")
    name = r.expect("IDENT", "the instance name")
    r.expect(":")
    schema_tok = r.peek()
    schema_name = r.expect("IDENT", "a schema name")
    try:
        schema = resolve_schema(schema_name)
    except KeyError:
        raise FormatError(
            f"unknown schema {schema_name!r}", schema_tok[2], schema_tok[3], source
        ) from None
    r.expect("{")
    carriers: dict[str, list[str]] = {}
    actions: dict[str, dict[str, str]] = {}
    node_names = set(schema.nodes)
    arrow_names = set(schema.arrow_map)
    while r.peek()[0] != "}":
        head_tok = r.peek()
        head = r.expect("IDENT", "a node or arrow name")
        is_node, is_arrow = head in node_names, head in arrow_names
        if is_node and is_arrow:
            raise FormatError(
                f"{head!r} names both a node and an arrow; the text format "
                "cannot express this schema",
                head_tok[2], head_tok[3], source,
            )
        if not (is_node or is_arrow):
            raise FormatError(
                f"{head!r} is neither a node nor an arrow of {schema_name!r}",
                head_tok[2], head_tok[3], source,
            )
        r.expect("=")
        r.expect("{")
        if is_node:
            elems: list[str] = []
            while r.peek()[0] != "}":
                elems.append(r.expect("IDENT", "an element"))
                if r.peek()[0] == ",":
                    r.next()
            r.expect("}")
            if head in carriers:
                raise FormatError(f"carrier {head!r} given twice", head_tok[2], head_tok[3], source)
            carriers[head] = elems
        else:
            mapping: dict[str, str] = {}
            while r.peek()[0] != "}":
                x_tok = r.peek()
                x = r.expect("IDENT", "an element")
                r.expect("->")
                y = r.expect("IDENT", "an element")
                if x in mapping:
                    raise FormatError(f"action {head!r} maps {x!r} twice", x_tok[2], x_tok[3], source)
                mapping[x] = y
                if r.peek()[0] == ",":
                    r.next()
            r.expect("}")
            if head in actions:
                raise FormatError(f"action {head!r} given twice", head_tok[2], head_tok[3], source)
            actions[head] = mapping
        r.expect(";")
    r.expect("}")
    r.expect("EOF", "end of file")
    try:
        return Instance(schema, carriers, actions, name=name)
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc), 1, 1, source) from exc


def _format_path(schema: Schema, p: Path) -> str:
    if not p.arrows:
        return f"id@{p.start}"
    return ".".join(p.arrows)


def format_schema(s: Schema) -> str:
    lines = [f"schema {s.name} {{"]
    for d in s.nodes:
        lines.append(f"  node {d};")
    for a in s.arrows:
        lines.append(f"  arrow {a.name}: {a.src} -> {a.tgt};")
    for p, q in s.relations:
        lines.append(f"  relation {_format_path(s, p)} = {_format_path(s, q)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _require_printable(name: str) -> str:
    if not _IDENT.fullmatch(name):
        raise ValueError(
            f"{name!r} is not printable in the text format; relabel canonically first"
        )
    return name


def format_instance(F: Instance, name: str | None = None) -> str:
    name = name or F.name or "unnamed"
    _require_printable(name)
    lines = [f"instance {name} : {F.schema.name} {{"]
    for d in F.schema.nodes:
        elems = ", ".join(_require_printable(x) for x in F.carriers[d])
        lines.append(f"  {d} = {{{elems}}};")
    for a in F.schema.arrows:
        pairs = ", ".join(
            f"{x} -> {F.actions[a.name][x]}" for x in F.carriers[a.src]
        )
        lines.append(f"  {a.name} = {{{pairs}}};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON shapes used by verification reports and replayable witnesses


def instance_to_jsonable(F: Instance) -> dict:
    return {
        "schema": F.schema.name,
        "name": F.name,
        "carriers": {d: list(F.carriers[d]) for d in F.schema.nodes},
        "actions": {
            a.name: {x: F.actions[a.name][x] for x in F.carriers[a.src]}
            for a in F.schema.arrows
        },
    }


def instance_from_jsonable(schema: Schema, obj: Mapping) -> Instance:
    if obj.get("schema") != schema.name:
        raise ValueError(
            f"serialized instance is over {obj.get('schema')!r}, not {schema.name!r}"
        )
    return Instance(schema, obj["carriers"], obj["actions"], name=obj.get("name"))


def morphism_to_jsonable(m: Morphism) -> dict:
    return {
        "src": instance_to_jsonable(m.src),
        "tgt": instance_to_jsonable(m.tgt),
        "components": {d: dict(m.components[d]) for d in m.src.schema.nodes},
    }


def morphism_from_jsonable(schema: Schema, obj: Mapping) -> Morphism:
    return Morphism(
        instance_from_jsonable(schema, obj["src"]),
        instance_from_jsonable(schema, obj["tgt"]),
        obj["components"],
    )
