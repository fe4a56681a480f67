"""Closed-form scalar fields on the plane: parser, evaluation, exact derivatives.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' rational)?
    base   := number | 'x1' | 'x2' | '(' expr ')' | 'sqrt(' expr ')' | '-' base

``rational`` is a signed number or a parenthesised ``(p/q)``.  Unary minus is
part of ``base``, so ``-x1^2`` parses as ``(-x1)^2``; write ``-(x1^2)`` or
``0 - x1^2`` for the other reading.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Optional

import numpy as np


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Node:
    __slots__ = ()

    def eval(self, x1, x2):
        raise NotImplementedError

    def diff(self, var: int) -> "Node":
        raise NotImplementedError


class Const(Node):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = Fraction(value)

    def eval(self, x1, x2):
        return np.full(np.shape(x1), float(self.value))

    def diff(self, var):
        return ZERO

    def __str__(self):
        v = self.value
        return str(v.numerator) if v.denominator == 1 else f"({v.numerator}/{v.denominator})"

    def __eq__(self, other):
        return isinstance(other, Const) and other.value == self.value

    def __hash__(self):
        return hash(self.value)


ZERO = Const(0)
ONE = Const(1)


class Var(Node):
    __slots__ = ("index",)

    def __init__(self, index: int):
        self.index = index

    def eval(self, x1, x2):
        return np.asarray(x1 if self.index == 0 else x2, dtype=float)

    def diff(self, var):
        return ONE if var == self.index else ZERO

    def __str__(self):
        return f"x{self.index + 1}"


class Neg(Node):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    def eval(self, x1, x2):
        return -self.arg.eval(x1, x2)

    def diff(self, var):
        return neg(self.arg.diff(var))

    def __str__(self):
        return f"-({self.arg})"


class Binary(Node):
    __slots__ = ("left", "right")
    symbol = "?"

    def __init__(self, left, right):
        self.left = left
        self.right = right

    def __str__(self):
        return f"({self.left} {self.symbol} {self.right})"


class Add(Binary):
    symbol = "+"

    def eval(self, x1, x2):
        return self.left.eval(x1, x2) + self.right.eval(x1, x2)

    def diff(self, var):
        return add(self.left.diff(var), self.right.diff(var))


class Sub(Binary):
    symbol = "-"

    def eval(self, x1, x2):
        return self.left.eval(x1, x2) - self.right.eval(x1, x2)

    def diff(self, var):
        return sub(self.left.diff(var), self.right.diff(var))


class Mul(Binary):
    symbol = "*"

    def eval(self, x1, x2):
        return self.left.eval(x1, x2) * self.right.eval(x1, x2)

    def diff(self, var):
        return add(mul(self.left.diff(var), self.right), mul(self.left, self.right.diff(var)))


class Div(Binary):
    symbol = "/"

    def eval(self, x1, x2):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.left.eval(x1, x2) / self.right.eval(x1, x2)

    def diff(self, var):
        num = sub(mul(self.left.diff(var), self.right), mul(self.left, self.right.diff(var)))
        return div(num, power(self.right, Fraction(2)))


class Pow(Node):
    """Power with a rational exponent; non-integer exponents need a nonnegative base."""

    __slots__ = ("base", "exponent")

    def __init__(self, base, exponent: Fraction):
        self.base = base
        self.exponent = Fraction(exponent)

    def eval(self, x1, x2):
        b = self.base.eval(x1, x2)
        e = self.exponent
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if e.denominator == 1:
                return np.power(b, float(e))
            # outside the domain mask the field is undefined
            return np.where(b >= 0, np.power(np.abs(b), float(e)), np.nan)

    def diff(self, var):
        db = self.base.diff(var)
        if db == ZERO:
            return ZERO
        e = self.exponent
        return mul(mul(Const(e), power(self.base, e - 1)), db)

    def __str__(self):
        return f"({self.base})^{Const(self.exponent)}"


class Sqrt(Node):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg

    def eval(self, x1, x2):
        a = self.arg.eval(x1, x2)
        with np.errstate(invalid="ignore"):
            return np.where(a >= 0, np.sqrt(np.abs(a)), np.nan)

    def diff(self, var):
        da = self.arg.diff(var)
        if da == ZERO:
            return ZERO
        return div(da, mul(Const(2), self))

    def __str__(self):
        return f"sqrt({self.arg})"


# Smart constructors: fold constants and drop 0/1 identities so derivative trees stay small.

def add(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if a == ZERO:
        return b
    if b == ZERO:
        return a
    return Add(a, b)


def sub(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if b == ZERO:
        return a
    if a == ZERO:
        return neg(b)
    return Sub(a, b)


def neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a, b):
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if a == ZERO or b == ZERO:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    return Mul(a, b)


def div(a, b):
    if isinstance(b, Const):
        if b.value == 0:
            return Div(a, b)
        return mul(Const(1 / b.value), a)
    if a == ZERO:
        return ZERO
    return Div(a, b)


def power(a, e: Fraction):
    e = Fraction(e)
    if e == 0:
        return ONE
    if e == 1:
        return a
    if isinstance(a, Const) and e.denominator == 1 and not (a.value == 0 and e < 0):
        return Const(a.value ** int(e))
    return Pow(a, e)


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(r"(\d+\.?\d*|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S)")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        kind = ("num", "name", "op")[m.lastindex - 1]
        tokens.append((kind, m.group(m.lastindex), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.take()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self) -> Node:
        node = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        node = self.base()
        if self.peek()[1] == "^":
            self.take()
            node = Pow(node, self.rational())
        return node

    def rational(self) -> Fraction:
        kind, v, pos = self.peek()
        if v == "(":
            self.take()
            value = self.signed_number()
            if self.peek()[1] == "/":
                self.take()
                den_pos = self.peek()[2]
                den = self.signed_number()
                if den == 0:
                    raise ParseError("zero denominator in exponent", den_pos)
                value = value / den
            self.expect(")")
            return value
        return self.signed_number()

    def signed_number(self) -> Fraction:
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        kind, v, pos = self.take()
        if kind != "num":
            found = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected a number in exponent, found {found}", pos)
        return sign * Fraction(v)

    def base(self):
        kind, v, pos = self.take()
        if kind == "num":
            return Const(Fraction(v))
        if kind == "name":
            if v == "x1":
                return Var(0)
            if v == "x2":
                return Var(1)
            if v == "sqrt":
                self.expect("(")
                node = self.expr()
                self.expect(")")
                return Sqrt(node)
            raise ParseError(f"unknown identifier {v!r}", pos)
        if v == "(":
            node = self.expr()
            self.expect(")")
            return node
        if v == "-":
            return Neg(self.base())
        found = "end of input" if kind == "end" else repr(v)
        raise ParseError(f"expected a number, x1, x2, '(' or sqrt, found {found}", pos)


def parse_node(text: str) -> Node:
    return _Parser(text).parse()


class GeneratingFunction:
    """A scalar field h(x1, x2) with exact symbolic gradient and Hessian.

    All evaluators accept scalars or equal-shape arrays and return NaN where
    the field leaves its domain (a fractional power of a negative number).
    """

    def __init__(self, tree: Node, text: Optional[str] = None, box=None):
        self.tree = tree
        self.text = text if text is not None else str(tree)
        self.box = box
        self.grad_trees = (tree.diff(0), tree.diff(1))
        g1, g2 = self.grad_trees
        self.hess_trees = (g1.diff(0), g1.diff(1), g2.diff(1))

    def __repr__(self):
        return f"GeneratingFunction({self.text!r})"

    def __sub__(self, other: "GeneratingFunction") -> "GeneratingFunction":
        return GeneratingFunction(Sub(self.tree, other.tree), f"({self.text}) - ({other.text})")

    def value(self, x1, x2):
        return self.tree.eval(np.asarray(x1, float), np.asarray(x2, float))

    def gradient(self, x1, x2) -> np.ndarray:
        """Array of shape (2, ...)."""
        x1, x2 = np.asarray(x1, float), np.asarray(x2, float)
        return np.stack([t.eval(x1, x2) for t in self.grad_trees])

    def hessian(self, x1, x2) -> np.ndarray:
        """Array of shape (2, 2, ...)."""
        x1, x2 = np.asarray(x1, float), np.asarray(x2, float)
        a, b, d = (t.eval(x1, x2) for t in self.hess_trees)
        return np.stack([np.stack([a, b]), np.stack([b, d])])


def parse_expression(text: str, box=None) -> GeneratingFunction:
    return GeneratingFunction(parse_node(text), text, box)
