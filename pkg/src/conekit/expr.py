"""Arithmetic expressions for user test functions ``f(x, t)``.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are ``x1, x2, x3`` and ``t``; functions are ``exp, sin, cos,
sqrt, abs``.  ``-x^2`` parses as ``-(x^2)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, ExprSyntaxError

__all__ = ["Const", "Var", "Unary", "Binary", "parse_expr", "to_text", "evaluate_expr", "compile_expr"]

VARIABLES = ("x1", "x2", "x3", "t")
FUNCTIONS = ("exp", "sin", "cos", "sqrt", "abs")
BINARY = ("+", "-", "*", "/", "^")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a function name
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


_TOKEN = re.compile(r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", *_line_col(text, pos))
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise ExprSyntaxError(msg, *_line_col(self.text, tok.pos))

    def take(self, text: str):
        tok = self.peek()
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text or 'end of input'!r}")
        self.i += 1

    def parse(self):
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.peek().text
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.peek().text
            self.i += 1
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.peek().text == "-":
            self.i += 1
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek().text == "^":
            self.i += 1
            node = Binary("^", node, self.unary())
        return node

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.i += 1
            return Const(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Unary(tok.text, arg)
            self.error(f"unknown identifier {tok.text!r}", tok)
        if tok.text == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        self.error(f"unexpected {tok.text or 'end of input'!r}", tok)


def parse_expr(text: str):
    """Parse ``text`` into an AST; raises ``ExprSyntaxError`` with line/column."""
    return _Parser(text).parse()


def to_text(node) -> str:
    """Canonical, fully parenthesized form; ``parse_expr(to_text(a)) == a``."""
    if isinstance(node, Const):
        v = node.value
        return repr(v) if v >= 0 else f"(-{repr(-v)})"
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{to_text(node.arg)})"
        return f"{node.op}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"


def _eval(node, env):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise EvaluationError(f"variable {node.name} is not defined for this dimension")
        return env[node.name]
    if isinstance(node, Unary):
        a = _eval(node.arg, env)
        if node.op == "neg":
            return -a
        if node.op == "sqrt" and np.any(np.asarray(a) < 0):
            raise EvaluationError("sqrt of a negative value")
        return getattr(np, node.op)(a)
    a, b = _eval(node.left, env), _eval(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(np.asarray(b) == 0):
            raise EvaluationError("division by zero")
        return a / b
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.power(np.asarray(a, dtype=float), b)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("power undefined at some point (negative base or zero to a negative power)")
    return out


def evaluate_expr(node, x, t) -> np.ndarray:
    """Evaluate at points ``x`` (shape ``(N, d)``) and ``t`` (shape ``(N,)``)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    env = {f"x{i + 1}": x[:, i] for i in range(min(x.shape[1], 3))}
    env["t"] = t
    out = _eval(node, env)
    return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()


def compile_expr(text: str):
    """``f(x, t)`` callable for an expression string."""
    node = parse_expr(text)
    return lambda x, t: evaluate_expr(node, x, t)
