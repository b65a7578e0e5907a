"""Recursive-descent parser for differential-polynomial expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('-' | '+') factor | base ('^' INT)?
    base   := INT | dvar | '(' expr ')' | 'D(' expr (',' ('x' | 't' | 'v'))+ ')'
    dvar   := IDENT ('_' [txv]+)?

``v`` is accepted wherever ``x`` is, so ODEs in the travelling coordinate can
be written as ``w_vvv``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .diffalg import DiffPoly, DVar, RationalDiffExpr, is_constant_name, is_registered

__all__ = ["ParseError", "Num", "Var", "Neg", "BinOp", "Pow", "Deriv",
           "parse", "parse_expr", "lower", "render"]


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


Span = tuple[int, int]


@dataclass(frozen=True)
class Num:
    value: int
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    t_order: int = 0
    x_order: int = 0
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exp: int
    span: Span = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Deriv:
    expr: "Node"
    wrt: tuple[str, ...]
    span: Span = field(default=(0, 0), compare=False)


Node = Union[Num, Var, Neg, BinOp, Pow, Deriv]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*(?:_[A-Za-z]+)?)|(.))")


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(0).strip() == "":
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", m.group(1), start))
        elif m.group(2):
            toks.append(("ident", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.peek()[2] if pos is None else pos, self.text)

    def expect(self, value):
        kind, val, pos = self.peek()
        if val != value:
            self.fail(f"expected {value!r}, found {val or 'end of input'!r}")
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return node

    def expr(self) -> Node:
        start = self.peek()[2]
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.term()
            node = BinOp(op, node, right, (start, self._here()))
        return node

    def term(self) -> Node:
        start = self.peek()[2]
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            right = self.factor()
            node = BinOp(op, node, right, (start, self._here()))
        return node

    def factor(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "op" and val in ("-", "+"):
            self.take()
            inner = self.factor()
            return Neg(inner, (pos, self._here())) if val == "-" else inner
        node = self.base()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            kind, val, epos = self.peek()
            if kind == "op" and val == "-":
                self.fail("negative exponent; write a quotient instead", epos)
            if kind != "int":
                self.fail("exponent must be a non-negative integer", epos)
            self.take()
            node = Pow(node, int(val), (pos, self._here()))
        return node

    def base(self) -> Node:
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            return Num(int(val), (pos, self._here()))
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "ident" and val == "D" and self.toks[self.i + 1][1] == "(":
            self.take()
            self.take()
            inner = self.expr()
            wrt = []
            while self.peek()[1] == ",":
                self.take()
                k2, v2, p2 = self.peek()
                if k2 != "ident" or v2 not in ("x", "t", "v"):
                    self.fail("derivative variable must be x, t or v", p2)
                self.take()
                wrt.append("x" if v2 == "v" else v2)
            if not wrt:
                self.fail("D(...) needs at least one derivation variable")
            self.expect(")")
            return Deriv(inner, tuple(wrt), (pos, self._here()))
        if kind == "ident":
            self.take()
            return self.dvar(val, pos)
        self.fail(f"unexpected {val or 'end of input'!r}")

    def dvar(self, tok: str, pos: int) -> Var:
        name, _, sub = tok.partition("_")
        if not is_registered(name):
            raise ParseError(f"unknown identifier {name!r}", pos, self.text)
        if sub:
            if set(sub) - set("txv"):
                raise ParseError(f"bad derivative subscript {sub!r}", pos, self.text)
            if "t" in sub and "v" in sub:
                raise ParseError("cannot mix t with the travelling variable v", pos, self.text)
            if is_constant_name(name):
                raise ParseError(f"constant {name!r} cannot carry derivatives", pos, self.text)
        t = sub.count("t")
        x = sub.count("x") + sub.count("v")
        return Var(name, t, x, (pos, self._here()))

    def _here(self) -> int:
        prev = self.toks[self.i - 1]
        return prev[2] + len(prev[1])


def parse(text: str) -> Node:
    """Parse ``text`` to an AST; raises :class:`ParseError` with a position."""
    return _Parser(text).parse()


def lower(node: Node) -> DiffPoly | RationalDiffExpr:
    """Evaluate an AST into the exact algebra.

    Results whose denominator is a rational constant come back as DiffPoly.
    """
    r = _lower(node)
    if isinstance(r, RationalDiffExpr) and r.is_polynomial():
        return r.to_poly()
    return r


def _lower(node: Node):
    if isinstance(node, Num):
        return DiffPoly.constant(node.value)
    if isinstance(node, Var):
        return DiffPoly.from_dvar(DVar(node.name, node.t_order, node.x_order))
    if isinstance(node, Neg):
        return -_lower(node.operand)
    if isinstance(node, Pow):
        return _lower(node.base) ** node.exp
    if isinstance(node, Deriv):
        r = _lower(node.expr)
        for v in node.wrt:
            r = r.dx() if v == "x" else r.dt()
        return r
    a, b = _lower(node.left), _lower(node.right)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if isinstance(b, DiffPoly) and not b.names():
        c = b.as_scalar()
        if c == 0:
            raise ZeroDivisionError("division by zero")
        return a * Fraction(1, 1) / c if isinstance(a, DiffPoly) else a / b
    return RationalDiffExpr.coerce(a) / b


def parse_expr(text: str) -> DiffPoly | RationalDiffExpr:
    return lower(parse(text))


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def render(node: Node) -> str:
    """Text that parses back to a structurally equal tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Var):
        return DVar(node.name, node.t_order, node.x_order).render()
    if isinstance(node, Neg):
        inner = render(node.operand)
        if isinstance(node.operand, BinOp):
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(node, Pow):
        b = render(node.base)
        if isinstance(node.base, (BinOp, Neg, Pow)):
            b = f"({b})"
        return f"{b}^{node.exp}"
    if isinstance(node, Deriv):
        return f"D({render(node.expr)}, {', '.join(node.wrt)})"
    p = _PREC[node.op]
    left = render(node.left)
    if isinstance(node.left, BinOp) and _PREC[node.left.op] < p:
        left = f"({left})"
    right = render(node.right)
    if isinstance(node.right, BinOp) and _PREC[node.right.op] <= p:
        right = f"({right})"
    elif isinstance(node.right, Neg) and node.op in ("+", "-"):
        pass
    return f"{left} {node.op} {right}" if p == 1 else f"{left}{node.op}{right}"
