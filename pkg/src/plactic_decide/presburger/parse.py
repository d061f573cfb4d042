"""Parser for the Presburger sentence text grammar.

    term := int | var | term "+" term | term "-" term | int "*" var
    atom := term "<=" term | term "=" term | int "|" term
    form := atom | "!" form | form "&" form | form "or" form
          | form "->" form | "(" form ")" | ("exists"|"forall") var "." form

Also accepted: ``<``, ``>=``, ``>``, ``!=``, ``<->``, ``true``, ``false``.
Binding strength, loosest first: ``<->``, ``->`` (right associative),
``or``, ``&``, ``!``.  A quantifier body extends as far right as possible.
"""
from __future__ import annotations

import re

from . import formula as F
from .terms import LinearTerm

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><->|->|<=|>=|!=|<|>|=|\||\+|-|\*|!|&|\(|\)|\.))"
)
KEYWORDS = {"or", "exists", "forall", "true", "false"}


class ParseError(ValueError):
    pass


def tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, off: int = 0):
        j = self.i + off
        return self.toks[j] if j < len(self.toks) else (None, None)

    def take(self, value: str | None = None, kind: str | None = None) -> str:
        k, v = self.peek()
        if k is None or (value is not None and v != value) or (kind is not None and k != kind):
            want = value or kind
            raise ParseError(f"expected {want!r}, got {v!r}")
        self.i += 1
        return v

    def at(self, value: str) -> bool:
        return self.peek()[1] == value

    def parse(self) -> F.Formula:
        f = self.iff()
        if self.peek()[0] is not None:
            raise ParseError(f"trailing input at {self.peek()[1]!r}")
        return f

    def iff(self):
        f = self.implies()
        while self.at("<->"):
            self.take()
            f = F.iff(f, self.implies())
        return f

    def implies(self):
        f = self.disj()
        if self.at("->"):
            self.take()
            return F.implies(f, self.implies())
        return f

    def disj(self):
        parts = [self.conj()]
        while self.at("or"):
            self.take()
            parts.append(self.conj())
        return F.or_(*parts)

    def conj(self):
        parts = [self.unary()]
        while self.at("&"):
            self.take()
            parts.append(self.unary())
        return F.and_(*parts)

    def unary(self):
        k, v = self.peek()
        if v == "!":
            self.take()
            return F.not_(self.unary())
        if v in ("exists", "forall") and k == "id":
            self.take()
            var = self.variable()
            self.take(".")
            body = self.iff()
            return (F.exists if v == "exists" else F.forall)(var, body)
        if v == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if v == "true" and k == "id":
            self.take()
            return F.TRUE
        if v == "false" and k == "id":
            self.take()
            return F.FALSE
        return self.atom()

    def variable(self) -> str:
        v = self.take(kind="id")
        if v in KEYWORDS:
            raise ParseError(f"keyword {v!r} used as a variable")
        return v

    def atom(self):
        k, v = self.peek()
        if k == "num" and self.peek(1)[1] == "|":
            d = int(self.take())
            self.take("|")
            modulus = d
            if modulus < 1:
                raise ParseError("divisibility modulus must be positive")
            return F.divides(modulus, self.term())
        lhs = self.term()
        op = self.take(kind="op")
        rhs = self.term()
        if op == "<=":
            return F.le(lhs, rhs)
        if op == "<":
            return F.lt(lhs, rhs)
        if op == ">=":
            return F.le(rhs, lhs)
        if op == ">":
            return F.lt(rhs, lhs)
        if op == "=":
            return F.eq(lhs, rhs)
        if op == "!=":
            return F.not_(F.eq(lhs, rhs))
        raise ParseError(f"expected a comparison, got {op!r}")

    def term(self) -> LinearTerm:
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        t = self.monomial() * sign
        while self.at("+") or self.at("-"):
            op = self.take()
            m = self.monomial()
            t = t + m if op == "+" else t - m
        return t

    def monomial(self) -> LinearTerm:
        k, v = self.peek()
        if k == "num":
            n = int(self.take())
            if self.at("*"):
                self.take()
                return LinearTerm.var(self.variable(), n)
            return LinearTerm(n)
        if k == "id":
            return LinearTerm.var(self.variable())
        raise ParseError(f"expected a term, got {v!r}")


def parse_formula(text: str) -> F.Formula:
    return _Parser(text).parse()
