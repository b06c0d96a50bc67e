"""Recursive-descent parser for the smooth-expression grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' exponent)?          right associative
    atom    := number | 'x' digits | prim '(' expr ')' | '(' expr ')'

Exponents must reduce to integer constants.  ``/`` is sugar for
multiplication by an integer power -1.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .expr import (PRIMITIVES, Apply, Const, SmoothExpr, Var, add, mul, neg,
                   power)


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.message = message
        self.offset = offset


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_VAR = re.compile(r"x(\d+)$")


def tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, arity: int | None):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.arity = arity

    def error(self, message: str, tok=None):
        tok = tok or self.tokens[self.i]
        return ParseError(message, _byte_offset(self.text, tok[2]))

    @property
    def tok(self):
        return self.tokens[self.i]

    def accept(self, value: str) -> bool:
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value: str):
        if not self.accept(value):
            found = self.tok[1] or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")

    def parse(self) -> SmoothExpr:
        e = self.expr()
        if self.tok[0] != "end":
            raise self.error(f"unexpected {self.tok[1]!r}")
        return e

    def expr(self) -> SmoothExpr:
        terms = [self.term()]
        while True:
            if self.accept("+"):
                terms.append(self.term())
            elif self.accept("-"):
                terms.append(neg(self.term()))
            else:
                return add(*terms) if len(terms) > 1 else terms[0]

    def term(self) -> SmoothExpr:
        factors = [self.unary()]
        while True:
            if self.accept("*"):
                factors.append(self.unary())
            elif self.accept("/"):
                factors.append(power(self.unary(), -1))
            else:
                return mul(*factors) if len(factors) > 1 else factors[0]

    def unary(self) -> SmoothExpr:
        if self.accept("-"):
            return neg(self.unary())
        if self.accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> SmoothExpr:
        base = self.atom()
        if self.accept("^"):
            return power(base, self.exponent())
        return base

    def exponent(self) -> int:
        tok = self.tok
        if self.accept("-"):
            return -self.exponent()
        e = self.power()
        if not isinstance(e, Const) or e.value.denominator != 1:
            raise self.error("exponent must be an integer constant", tok)
        return e.value.numerator

    def atom(self) -> SmoothExpr:
        kind, text, _ = tok = self.tok
        if kind == "num":
            self.i += 1
            return Const(Fraction(text))
        if kind == "name":
            self.i += 1
            m = _VAR.match(text)
            if m:
                idx = int(m.group(1))
                if self.arity is not None and idx >= self.arity:
                    raise self.error(
                        f"variable {text} out of range for arity {self.arity}", tok)
                return Var(idx)
            if text not in PRIMITIVES:
                raise self.error(f"unknown primitive {text!r}", tok)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Apply(text, arg)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"expected an expression, found {text or 'end of input'!r}")


def parse(text: str, arity: int | None = None) -> SmoothExpr:
    """Parse ``text`` into a canonical SmoothExpr.

    When ``arity`` is given, variables ``x{arity}`` and above are rejected.
    """
    return _Parser(text, arity).parse()


def to_text(e: SmoothExpr) -> str:
    """Canonical printed form (the golden-test format)."""
    return e.printed
