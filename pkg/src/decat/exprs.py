"""A small expression language for class-ring arithmetic.

Grammar (left associative, ``*`` binds tighter)::

    expr := term { ('+' | '-') term }
    term := atom { '*' atom }
    atom := NAT | IDENT | '(' expr ')'

Identifiers name instances; a natural literal ``n`` denotes ``n`` copies
of the one-fixed-point class.  Evaluation maps atoms through component
decomposition into the integer class ring, and the operators to its ring
operations, so ``A - A`` is zero and ``2*B`` means ``B + B``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .core import Instance, Schema, SchemaMismatch
from .ring import RingElement, class_of, one, ring_zero, to_ring

__all__ = [
    "ExprSyntaxError",
    "UnknownIdentifier",
    "Num",
    "Name",
    "BinOp",
    "RingExpr",
    "parse_expr",
    "eval_expr",
]


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownIdentifier(ValueError):
    def __init__(self, name: str):
        super().__init__(f"unresolved identifier {name!r}")
        self.name = name


@dataclass(frozen=True)
class Num:
    value: int

    def sexpr(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Name:
    ident: str

    def sexpr(self) -> str:
        return self.ident


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "RingExpr"
    right: "RingExpr"

    def sexpr(self) -> str:
        return f"({self.op} {self.left.sexpr()} {self.right.sexpr()})"


RingExpr = Union[Num, Name, BinOp]

_TOKEN = re.compile(r"[0-9]+|[A-Za-z_][A-Za-z0-9_]*|[-+*()]|\S")


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    for lineno, line in enumerate(text.splitlines() or [""], start=1):
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(line, pos)
            assert m is not None
            word = m.group()
            col = pos + 1
            if word.isdigit():
                kind = "NAT"
            elif re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", word):
                kind = "IDENT"
            elif word in "+-*()":
                kind = word
            else:
                raise ExprSyntaxError(f"unexpected character {word!r}", lineno, col)
            tokens.append((kind, word, lineno, col))
            pos = m.end()
    last_line = text.count("\n") + 1
    tokens.append(("EOF", "", last_line, len(text.splitlines()[-1]) + 1 if text.splitlines() else 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int, int]:
        return self.tokens[self.pos]

    def next(self) -> tuple[str, str, int, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str) -> "ExprSyntaxError":
        kind, word, line, col = self.peek()
        shown = word or "end of input"
        return ExprSyntaxError(f"{message}, found {shown!r}", line, col)

    def parse(self) -> RingExpr:
        e = self.expr()
        if self.peek()[0] != "EOF":
            raise self.fail("expected end of expression")
        return e

    def expr(self) -> RingExpr:
        left = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> RingExpr:
        left = self.atom()
        while self.peek()[0] == "*":
            self.next()
            left = BinOp("*", left, self.atom())
        return left

    def atom(self) -> RingExpr:
        kind, word, _, _ = self.peek()
        if kind == "NAT":
            self.next()
            return Num(int(word))
        if kind == "IDENT":
            self.next()
            return Name(word)
        if kind == "(":
            self.next()
            e = self.expr()
            if self.peek()[0] != ")":
                raise self.fail("expected ')'")
            self.next()
            return e
        raise self.fail("expected a number, an identifier, or '('")


def parse_expr(text: str) -> RingExpr:
    """Parse ``text``; syntax errors carry line and column."""
    return _Parser(text).parse()


def eval_expr(
    expr: RingExpr | str,
    defs: Mapping[str, Instance],
    schema: Schema | None = None,
) -> RingElement:
    """Evaluate an expression against named instances.

    Identifiers must resolve through ``defs`` to instances of one schema;
    ``schema`` is only needed for expressions without identifiers (pure
    literals), where the ambient schema cannot be inferred.
    """
    if isinstance(expr, str):
        expr = parse_expr(expr)

    names: list[str] = []

    def collect(e: RingExpr) -> None:
        if isinstance(e, Name):
            names.append(e.ident)
        elif isinstance(e, BinOp):
            collect(e.left)
            collect(e.right)

    collect(expr)
    resolved: dict[str, Instance] = {}
    for n in names:
        if n not in defs:
            raise UnknownIdentifier(n)
        resolved[n] = defs[n]
    schemas = {inst.schema for inst in resolved.values()}
    if len(schemas) > 1:
        found = sorted(s.name for s in schemas)
        raise SchemaMismatch(f"identifiers span several schemas: {found}")
    if schemas:
        inferred = schemas.pop()
        if schema is not None and schema != inferred:
            raise SchemaMismatch("explicit schema disagrees with the identifiers")
        schema = inferred
    if schema is None:
        raise ValueError("expression has no identifiers; pass the schema explicitly")

    unit = to_ring(one(schema))
    atom_cache: dict[str, RingElement] = {}

    def ev(e: RingExpr) -> RingElement:
        if isinstance(e, Num):
            return unit.scale(e.value)
        if isinstance(e, Name):
            if e.ident not in atom_cache:
                atom_cache[e.ident] = to_ring(class_of(resolved[e.ident]))
            return atom_cache[e.ident]
        if e.op == "+":
            return ev(e.left) + ev(e.right)
        if e.op == "-":
            return ev(e.left) - ev(e.right)
        if e.op == "*":
            return ev(e.left) * ev(e.right)
        raise AssertionError(f"unknown operator {e.op!r}")

    result = ev(expr)
    if result.is_zero:
        return ring_zero(schema)
    return result
