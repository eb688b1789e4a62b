"""Plain-text expression syntax: integers, decimals, ``i``, ``+ - * / ^``, parentheses."""

from __future__ import annotations

import re
from fractions import Fraction

from . import rings
from .gaussrat import GaussRat
from .ratfun import RatFun

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)"
    r"|(?P<name>[A-Za-z_Ͱ-Ͽℓ][\w]*∞?)"
    r"|(?P<op>\*\*|[-+*/^()]))"
)


class ParseError(ValueError):
    pass


def _tokens(text: str) -> list[tuple[str, str]]:
    out, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        kind = m.lastgroup
        val = m.group(kind)
        out.append((kind, "^" if val == "**" else val))
        pos = m.end()
    out.append(("end", ""))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokens(text)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self, val=None):
        tok = self.toks[self.k]
        if val is not None and tok[1] != val:
            raise ParseError(f"expected {val!r}, found {tok[1] or 'end of input'!r}")
        self.k += 1
        return tok

    def expr(self) -> RatFun:
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> RatFun:
        acc = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            acc = acc * rhs if op == "*" else acc / rhs
        return acc

    def unary(self) -> RatFun:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RatFun:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] == "-":
                self.take()
                sign = -1
            if self.peek()[1] == "(":
                self.take()
                exp = self.expr()
                self.take(")")
                if not exp.is_constant() or exp.to_gaussrat().im != 0 \
                        or exp.to_gaussrat().re.denominator != 1:
                    raise ParseError("exponents must be integers")
                n = int(exp.to_gaussrat().re)
            else:
                kind, val = self.take()
                if kind != "num" or not val.isdigit():
                    raise ParseError("exponents must be integers")
                n = int(val)
            return base ** (sign * n)
        return base

    def atom(self) -> RatFun:
        kind, val = self.take()
        if kind == "num":
            return RatFun.constant(Fraction(val))
        if kind == "name":
            if val == "i":
                return RatFun.constant(GaussRat(0, 1))
            return RatFun.symbol(rings.ALIASES.get(val, val))
        if val == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected token {val or 'end of input'!r}")


def parse(text: str) -> RatFun:
    """Parse an expression into a canonical RatFun."""
    p = _Parser(text)
    out = p.expr()
    if p.peek()[0] != "end":
        raise ParseError(f"trailing input at token {p.peek()[1]!r}")
    return out


def parse_gaussrat(text: str) -> GaussRat:
    value = parse(text)
    if not value.is_constant():
        raise ParseError(f"{text!r} is not a constant")
    return value.to_gaussrat()
