"""Text form of rational functions.

Grammar (whitespace, including newlines, is insignificant)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | NAME | "(" expr ")"

There is no implicit multiplication; ``NAME`` must be a registered variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .polynomial import Polynomial
from .rational import RationalFunction
from .variables import Variable, is_registered

__all__ = ["parse", "ParseError", "to_text"]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # "int", "name", "op", "end"
    text: str
    line: int
    column: int


_TOKEN = re.compile(r"(?P<ws>[ \t\r\n]+)|(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^()])")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line, col = 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        chunk = m.group()
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, chunk, line, col))
        for ch in chunk:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        pos = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    def expr(self) -> RationalFunction:
        value = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> RationalFunction:
        value = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            tok = self.take()
            rhs = self.unary()
            if tok.text == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    self.fail("division by zero", tok)
                value = value / rhs
        return value

    def unary(self) -> RationalFunction:
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.take()
            inner = self.unary()
            return -inner if tok.text == "-" else inner
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "int":
                self.fail("exponent must be a non-negative integer literal")
            self.take()
            return base ** int(tok.text)
        return base

    def atom(self) -> RationalFunction:
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            return RationalFunction.coerce(int(tok.text))
        if tok.kind == "name":
            self.take()
            if not is_registered(tok.text):
                self.fail(f"unknown variable {tok.text!r}", tok)
            return RationalFunction.coerce(Variable(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.take()
            value = self.expr()
            if not (self.peek().kind == "op" and self.peek().text == ")"):
                self.fail("expected ')'")
            self.take()
            return value
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {tok.text!r}")


def parse(text: str) -> RationalFunction:
    p = _Parser(text)
    value = p.expr()
    if p.peek().kind != "end":
        p.fail(f"unexpected token {p.peek().text!r}")
    return value


def to_text(f) -> str:
    """Canonical printer (``str`` of the canonical form)."""
    if isinstance(f, Polynomial):
        return str(f)
    return str(RationalFunction.coerce(f))
