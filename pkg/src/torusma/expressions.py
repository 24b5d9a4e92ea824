"""Tiny expression grammar for smooth periodic data in config files.

Grammar (recursive descent):

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | atom
    atom   := NUMBER | '(' expr ')' | 'exp' '(' expr ')' | trig
    trig   := ('sin' | 'cos') '(' 2 '*' pi ['*' INT] '*' coord ')'
    coord  := x1 | y1 | x2 | y2

Every trig factor is an exact grid harmonic, so parsed data is smooth,
periodic and exactly representable; the largest integer harmonic is tracked
for the N/4 band-limit check.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .grid import Grid, PeriodicScalarField, make_field


class ExpressionError(ValueError):
    """Syntax or semantic error in a field expression."""


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[()+\-*]))"
)


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionError(f"unexpected character at position {pos}: {text[pos:]!r}")
        pos = m.end()
        for kind in ("num", "name", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    tokens.append(("end", ""))
    return tokens


@dataclass
class Expression:
    """Parsed expression; evaluate on a grid, with its max harmonic recorded."""

    text: str
    _ast: tuple
    max_harmonic: int

    def evaluate(self, grid: Grid) -> PeriodicScalarField:
        values = _eval_node(self._ast, grid)
        return make_field(grid, values.astype(complex))

    def band_limited(self, grid: Grid) -> bool:
        return self.max_harmonic <= grid.N // 4


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.max_harmonic = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ExpressionError(f"expected {kind}, got {tok[1]!r} in {self.text!r}")
        if value is not None and tok[1] != value:
            raise ExpressionError(f"expected {value!r}, got {tok[1]!r} in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ExpressionError(f"trailing input {self.peek()[1]!r} in {self.text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*"):
            self.take()
            node = ("mul", node, self.unary())
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        return self.atom()

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return ("const", float(value))
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "name":
            if value in ("sin", "cos"):
                return self.trig()
            if value == "exp":
                self.take()
                self.take("op", "(")
                node = self.expr()
                self.take("op", ")")
                return ("exp", node)
            raise ExpressionError(f"unknown name {value!r} in {self.text!r}")
        raise ExpressionError(f"unexpected token {value!r} in {self.text!r}")

    def trig(self):
        func = self.take("name")[1]
        self.take("op", "(")
        two = self.take("num")[1]
        if float(two) != 2.0:
            raise ExpressionError("trig arguments must start with 2*pi")
        self.take("op", "*")
        self.take("name", "pi")
        self.take("op", "*")
        harmonic = 1
        kind, value = self.peek()
        if kind == "num":
            self.take()
            harmonic = int(float(value))
            if harmonic != float(value) or harmonic < 1:
                raise ExpressionError(f"harmonic must be a positive integer, got {value}")
            self.take("op", "*")
        coord = self.take("name")[1]
        if not re.fullmatch(r"[xy][12]", coord):
            raise ExpressionError(f"unknown coordinate {coord!r}")
        self.take("op", ")")
        self.max_harmonic = max(self.max_harmonic, harmonic)
        return ("trig", func, harmonic, coord)


def _coord_axis(grid: Grid, coord: str) -> int:
    j = int(coord[1]) - 1
    if j >= grid.n:
        raise ExpressionError(
            f"coordinate {coord} does not exist in complex dimension {grid.n}"
        )
    return 2 * j + (0 if coord[0] == "x" else 1)


def _eval_node(node: tuple, grid: Grid) -> np.ndarray:
    op = node[0]
    if op == "const":
        return np.full(grid.shape, node[1])
    if op == "neg":
        return -_eval_node(node[1], grid)
    if op == "add":
        return _eval_node(node[1], grid) + _eval_node(node[2], grid)
    if op == "sub":
        return _eval_node(node[1], grid) - _eval_node(node[2], grid)
    if op == "mul":
        return _eval_node(node[1], grid) * _eval_node(node[2], grid)
    if op == "exp":
        return np.exp(_eval_node(node[1], grid))
    if op == "trig":
        _, func, harmonic, coord = node
        x = grid.coordinate(_coord_axis(grid, coord))
        arg = 2.0 * np.pi * harmonic * x
        return np.sin(arg) if func == "sin" else np.cos(arg)
    raise AssertionError(f"unhandled node {node!r}")


def parse_expression(text: str) -> Expression:
    parser = _Parser(text)
    ast = parser.parse()
    return Expression(text=text, _ast=ast, max_harmonic=parser.max_harmonic)
