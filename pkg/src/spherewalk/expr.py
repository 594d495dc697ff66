"""A tiny total expression language for source/boundary data.

Grammar (standard precedence, left-associative):

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" INT)*          # nonnegative integer literals only
    atom   := NUMBER | COORD | IDENT "(" args ")" | IDENT | "(" expr ")"

Coordinates are ``x1 .. xd``; built-ins are ``abs(e)``, n-ary ``min``/
``max``, and the bare identifiers ``norm1`` (l1 norm of the point) and
``norm2sq`` (squared Euclidean norm).  There are no conditionals and no
user functions, so every expression is a total function of the point.
Errors carry the byte offset of the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .fields import Field


class ExprError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Coord:
    index: int  # zero-based


@dataclass(frozen=True)
class Norm1:
    pass


@dataclass(frozen=True)
class Norm2Sq:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class Abs:
    arg: "Node"


@dataclass(frozen=True)
class Bin:
    op: str  # + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class MinMax:
    op: str  # min | max
    args: Tuple["Node", ...]


Node = Union[Num, Coord, Norm1, Norm2Sq, Neg, Abs, Bin, Pow, MinMax]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)


def _tokens(src: str):
    pos = 0
    out = []
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if not m or m.end() == m.start():
            rest = src[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ExprError(f"unexpected character {src[bad]!r}", bad)
        if m.lastgroup == "num":
            out.append(("num", m.group("num"), m.start("num")))
        elif m.group("ident"):
            out.append(("ident", m.group("ident"), m.start("ident")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", "", len(src)))
    return out


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokens(src)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect_op(self, op: str):
        kind, val, off = self.take()
        if kind != "op" or val != op:
            raise ExprError(f"expected {op!r}, found {val!r}", off)

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprError(f"trailing input {val!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            node = Bin(op, node, self.factor())
        return node

    def factor(self) -> Node:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Node:
        node = self.atom()
        while self.peek()[:2] == ("op", "^"):
            self.take()
            kind, val, off = self.take()
            if kind != "num" or not re.fullmatch(r"\d+", val):
                raise ExprError("exponent must be a nonnegative integer literal", off)
            node = Pow(node, int(val))
        return node

    def atom(self) -> Node:
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        if kind == "ident":
            m = re.fullmatch(r"x(\d+)", val)
            if m:
                idx = int(m.group(1))
                if idx < 1:
                    raise ExprError("coordinates are numbered from x1", off)
                return Coord(idx - 1)
            if val == "norm1":
                return Norm1()
            if val == "norm2sq":
                return Norm2Sq()
            if val in ("abs", "min", "max"):
                self.expect_op("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.expr())
                self.expect_op(")")
                if val == "abs":
                    if len(args) != 1:
                        raise ExprError("abs takes exactly one argument", off)
                    return Abs(args[0])
                if len(args) < 2:
                    raise ExprError(f"{val} takes at least two arguments", off)
                return MinMax(val, tuple(args))
            raise ExprError(f"unknown identifier {val!r}", off)
        raise ExprError(f"unexpected token {val!r}", off)


def parse_expr(src: str) -> Node:
    return _Parser(src).parse()


def max_coord(node: Node) -> int:
    """Highest coordinate index used (1-based); 0 when coordinate-free."""
    if isinstance(node, Coord):
        return node.index + 1
    if isinstance(node, (Neg, Abs)):
        return max_coord(node.arg)
    if isinstance(node, Bin):
        return max(max_coord(node.left), max_coord(node.right))
    if isinstance(node, Pow):
        return max_coord(node.base)
    if isinstance(node, MinMax):
        return max(max_coord(a) for a in node.args)
    return 0


def evaluate(node: Node, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    return _eval(node, X)


def _eval(node: Node, X: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(X.shape[0], node.value)
    if isinstance(node, Coord):
        if node.index >= X.shape[1]:
            raise ExprError(
                f"coordinate x{node.index + 1} exceeds the point dimension {X.shape[1]}", 0
            )
        return X[:, node.index].copy()
    if isinstance(node, Norm1):
        return np.abs(X).sum(axis=1)
    if isinstance(node, Norm2Sq):
        return (X * X).sum(axis=1)
    if isinstance(node, Neg):
        return -_eval(node.arg, X)
    if isinstance(node, Abs):
        return np.abs(_eval(node.arg, X))
    if isinstance(node, Bin):
        a, b = _eval(node.left, X), _eval(node.right, X)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        with np.errstate(divide="ignore", invalid="ignore"):
            return a / b
    if isinstance(node, Pow):
        return _eval(node.base, X) ** node.exponent
    if isinstance(node, MinMax):
        vals = np.stack([_eval(a, X) for a in node.args])
        return vals.min(axis=0) if node.op == "min" else vals.max(axis=0)
    raise TypeError(f"unknown node {node!r}")


def to_string(node: Node) -> str:
    """Canonical text form; parse(to_string(n)) == n structurally."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Coord):
        return f"x{node.index + 1}"
    if isinstance(node, Norm1):
        return "norm1"
    if isinstance(node, Norm2Sq):
        return "norm2sq"
    if isinstance(node, Neg):
        return f"(-{to_string(node.arg)})"
    if isinstance(node, Abs):
        return f"abs({to_string(node.arg)})"
    if isinstance(node, Bin):
        return f"({to_string(node.left)}{node.op}{to_string(node.right)})"
    if isinstance(node, Pow):
        return f"({to_string(node.base)}^{node.exponent})"
    if isinstance(node, MinMax):
        return f"{node.op}({','.join(to_string(a) for a in node.args)})"
    raise TypeError(f"unknown node {node!r}")


def expr_field(src: str, dim: int) -> Field:
    """Compile an expression into a solver Field (generic-path callable)."""
    ast = parse_expr(src)
    need = max_coord(ast)
    if need > dim:
        raise ExprError(f"expression uses x{need} but the domain dimension is {dim}", 0)
    return Field.from_callable(lambda X: evaluate(ast, X), dim, name=f"expr:{src}")
