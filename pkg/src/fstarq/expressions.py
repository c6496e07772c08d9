"""Small arithmetic expression grammar used by the deformation mini-language.

Grammar (whitespace insensitive)::

    expr    := term (('+'|'-') term)*
    term    := factor (('*'|'/') factor)*
    factor  := ('+'|'-') factor | power
    power   := atom ('^' factor)?
    atom    := NUMBER | 'n' | ('sqrt'|'exp'|'ln') '(' expr ')' | '(' expr ')'

Parsed expressions evaluate on scalars or numpy arrays and support exact
symbolic differentiation (used for the analytic derivative chains in the
star-product machinery).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ParseError

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

FUNCTIONS = ("sqrt", "exp", "ln")


@dataclass(frozen=True)
class Token:
    kind: str  # 'number' | 'name' | one of + - * / ^ ( ) | 'end'
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            bad_at = len(text) - len(stripped)
            raise ParseError(f"unrecognized character {text[bad_at]!r}", bad_at)
        if m.group("number") is not None:
            tokens.append(Token("number", m.group("number"), m.start("number")))
        elif m.group("name") is not None:
            tokens.append(Token("name", m.group("name"), m.start("name")))
        else:
            tokens.append(Token(m.group("op"), m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------------------
# AST nodes


class Node:
    def __call__(self, n):
        raise NotImplementedError

    def diff(self) -> "Node":
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Node):
    value: float

    def __call__(self, n):
        return self.value * np.ones_like(np.asarray(n, dtype=float)) if np.ndim(n) else self.value

    def diff(self):
        return Num(0.0)


@dataclass(frozen=True)
class Var(Node):
    def __call__(self, n):
        return np.asarray(n, dtype=float) if np.ndim(n) else float(n)

    def diff(self):
        return Num(1.0)


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node

    def __call__(self, n):
        a = self.left(n)
        b = self.right(n)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            with np.errstate(divide="ignore", invalid="ignore"):
                return a / b
        # power; guard the 0**negative and negative-base cases to NaN rather
        # than raising so that domain checks happen at the eval_f level
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.power(a, b) if np.ndim(a) or np.ndim(b) else _scalar_pow(a, b)

    def diff(self):
        u, v = self.left, self.right
        du, dv = u.diff(), v.diff()
        if self.op == "+":
            return BinOp("+", du, dv)
        if self.op == "-":
            return BinOp("-", du, dv)
        if self.op == "*":
            return BinOp("+", BinOp("*", du, v), BinOp("*", u, dv))
        if self.op == "/":
            num = BinOp("-", BinOp("*", du, v), BinOp("*", u, dv))
            return BinOp("/", num, BinOp("*", v, v))
        # u^v: constant exponent gets the power rule, otherwise rewrite as
        # exp(v ln u) and differentiate that
        if isinstance(v, Num):
            c = v.value
            return BinOp("*", BinOp("*", Num(c), BinOp("^", u, Num(c - 1.0))), du)
        return BinOp("*", self, BinOp("+", BinOp("*", dv, Call("ln", u)),
                                      BinOp("*", v, BinOp("/", du, u))))


def _scalar_pow(a, b):
    try:
        r = math.pow(a, b)
    except (ValueError, OverflowError):
        return math.nan
    return r


@dataclass(frozen=True)
class Call(Node):
    fn: str
    arg: Node

    def __call__(self, n):
        x = self.arg(n)
        with np.errstate(invalid="ignore", divide="ignore"):
            if self.fn == "sqrt":
                return np.sqrt(x) if np.ndim(x) else (math.sqrt(x) if x >= 0 else math.nan)
            if self.fn == "exp":
                return np.exp(x) if np.ndim(x) else math.exp(x)
            return np.log(x) if np.ndim(x) else (math.log(x) if x > 0 else math.nan)

    def diff(self):
        dx = self.arg.diff()
        if self.fn == "sqrt":
            return BinOp("/", dx, BinOp("*", Num(2.0), self))
        if self.fn == "exp":
            return BinOp("*", self, dx)
        return BinOp("/", dx, self.arg)  # ln


# ---------------------------------------------------------------------------
# Recursive-descent parser


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"unexpected {tok.kind or 'end of input'} {tok.text!r}",
                             tok.pos, expected={kind})
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"trailing input {tok.text!r}", tok.pos, expected={"end"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.take().kind
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        tok = self.peek()
        if tok.kind == "+":
            self.take()
            return self.factor()
        if tok.kind == "-":
            self.take()
            return BinOp("-", Num(0.0), self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek().kind == "^":
            self.take()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Node:
        tok = self.peek()
        if tok.kind == "number":
            self.take()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.take()
            if tok.text == "n":
                return Var()
            if tok.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(tok.text, arg)
            raise ParseError(f"unknown name {tok.text!r}", tok.pos,
                             expected={"n", *FUNCTIONS})
        if tok.kind == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError(f"unexpected {tok.kind or 'end of input'}", tok.pos,
                         expected={"number", "name", "("})


def parse_scalar_expr(text: str) -> Node:
    """Parse an expression in the variable n into an evaluable AST."""
    if not text.strip():
        raise ParseError("empty expression", 0, expected={"number", "name", "("})
    return _Parser(tokenize(text)).parse()
