"""Recursive-descent parser for the polynomial text grammar.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := INT | 'i' | 'z' INT | '(' expr ')'

``**`` is accepted as a synonym for ``^``.  Division is only allowed by
nonzero constants.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .ring import GaussianRational, Polynomial

_TOKEN = re.compile(r"\s*(?:(\d+)|(z\d+)|(\*\*|[-+*/^()i]))")


MAX_POWER = 256


def _show(tok) -> str:
    return "end of input" if tok[0] == "end" else repr(tok[1])


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            stripped = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + stripped]!r}", pos + stripped)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2):
            tokens.append(("var", int(m.group(2)[1:]), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append((op, op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.n = n if n is not None else _infer_dim(self.tokens)

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {_show(tok)}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {_show(tok)}", tok[2])
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, pos = self.take()
            q = self.unary()
            if op == "*":
                p = p * q
            else:
                if q.is_zero():
                    raise ParseError("division by zero", pos)
                if q.total_degree() > 0:
                    raise ParseError("division by a non-constant", pos)
                p = p.scale(q.coefficient((0,) * self.n).inverse())
        return p

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            _, k, pos = self.take("int")
            if k > MAX_POWER:
                raise ParseError(f"exponent {k} exceeds the limit {MAX_POWER}", pos)
            return base ** k
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            return Polynomial.constant(val, self.n)
        if kind == "i":
            return Polynomial.constant(GaussianRational(0, 1), self.n)
        if kind == "var":
            if val < 1 or val > self.n:
                raise ParseError(f"variable out of range: z{val} with n={self.n}", pos)
            return Polynomial.variable(val - 1, self.n)
        if kind == "(":
            p = self.expr()
            self.take(")")
            return p
        raise ParseError(f"unexpected token {_show((kind, val, pos))}", pos)


def _infer_dim(tokens) -> int:
    return max([v for k, v, _ in tokens if k == "var"] + [1])


def parse_polynomial(text: str, n: int | None = None) -> Polynomial:
    """Parse ``text``; ``n`` defaults to the highest variable index used."""
    if n is not None and n < 1:
        raise ValueError("dimension must be >= 1")
    return _Parser(text, n).parse()


def parse_exponent(text: str) -> tuple:
    """Parse an exponent literal ``(a1,...,an)``."""
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ParseError("exponent literal must look like (a1,...,an)", 0)
    body = s[1:-1].strip()
    if not body:
        raise ParseError("empty exponent literal", 1)
    try:
        vals = tuple(int(x) for x in body.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ParseError(f"bad exponent entry: {exc}", 1) from None
    if any(v < 0 for v in vals):
        raise ParseError("exponent entries must be non-negative", 1)
    return vals


def parse_exponent_list(text: str) -> list:
    """Parse ``(1,0);(0,2)`` or ``(1,0) (0,2)`` into a list of exponents."""
    found = re.findall(r"\([^()]*\)", text)
    rest = re.sub(r"\([^()]*\)", "", text)
    if not found or rest.strip(" ;,\t"):
        raise ParseError(f"cannot read exponent list {text!r}", 0)
    return [parse_exponent(f) for f in found]


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}", 0) from None
