from __future__ import annotations

import re
from math import gcd
from typing import Mapping, Union

_NAT = re.compile(r"(\d+)")


def natural_key(name: str):
    """Sort key putting ``a2`` before ``a10``."""
    return tuple(int(p) if p.isdigit() else p for p in _NAT.split(name))


class LinearTerm:
    """Immutable integer linear combination ``const + sum(coeff * var)``."""

    __slots__ = ("const", "coeffs", "_hash")

    def __init__(self, const: int = 0, coeffs: Mapping[str, int] | tuple = ()):
        if isinstance(coeffs, tuple):
            items = coeffs
        else:
            items = tuple(sorted((v, c) for v, c in coeffs.items() if c))
        self.const = const
        self.coeffs = items
        self._hash = hash((const, items))

    @classmethod
    def var(cls, name: str, coeff: int = 1) -> "LinearTerm":
        return cls(0, ((name, coeff),) if coeff else ())

    @classmethod
    def of(cls, x: "TermLike") -> "LinearTerm":
        if isinstance(x, LinearTerm):
            return x
        if isinstance(x, int):
            return cls(x)
        if isinstance(x, str):
            return cls.var(x)
        raise TypeError(f"cannot make a term from {x!r}")

    def __eq__(self, other):
        return (
            isinstance(other, LinearTerm)
            and self._hash == other._hash
            and self.const == other.const
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"LinearTerm({self})"

    def __str__(self):
        return format_term(self)

    @property
    def is_const(self) -> bool:
        return not self.coeffs

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def coeff(self, name: str) -> int:
        for v, c in self.coeffs:
            if v == name:
                return c
        return 0

    def _combine(self, other: "LinearTerm", sign: int) -> "LinearTerm":
        if not other.coeffs:
            return LinearTerm(self.const + sign * other.const, self.coeffs)
        d = dict(self.coeffs)
        for v, c in other.coeffs:
            d[v] = d.get(v, 0) + sign * c
        return LinearTerm(self.const + sign * other.const, d)

    def __add__(self, other: "TermLike") -> "LinearTerm":
        return self._combine(LinearTerm.of(other), 1)

    __radd__ = __add__

    def __sub__(self, other: "TermLike") -> "LinearTerm":
        return self._combine(LinearTerm.of(other), -1)

    def __rsub__(self, other: "TermLike") -> "LinearTerm":
        return LinearTerm.of(other)._combine(self, -1)

    def __neg__(self) -> "LinearTerm":
        return LinearTerm(-self.const, tuple((v, -c) for v, c in self.coeffs))

    def __mul__(self, k: int) -> "LinearTerm":
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return ZERO
        return LinearTerm(self.const * k, tuple((v, c * k) for v, c in self.coeffs))

    __rmul__ = __mul__

    def without(self, name: str) -> "LinearTerm":
        return LinearTerm(self.const, tuple((v, c) for v, c in self.coeffs if v != name))

    def content(self) -> int:
        """gcd of the variable coefficients (0 for a constant)."""
        g = 0
        for _, c in self.coeffs:
            g = gcd(g, c)
        return g

    def substitute(self, mapping: Mapping[str, "LinearTerm"]) -> "LinearTerm":
        if not any(v in mapping for v, _ in self.coeffs):
            return self
        const = self.const
        d: dict[str, int] = {}
        for v, c in self.coeffs:
            t = mapping.get(v)
            if t is None:
                d[v] = d.get(v, 0) + c
            else:
                const += c * t.const
                for w, e in t.coeffs:
                    d[w] = d.get(w, 0) + c * e
        return LinearTerm(const, d)

    def evaluate(self, env: Mapping[str, int]) -> int:
        total = self.const
        for v, c in self.coeffs:
            total += c * env[v]
        return total


TermLike = Union[LinearTerm, int, str]
ZERO = LinearTerm(0)
ONE = LinearTerm(1)


def term_sum(parts) -> LinearTerm:
    const = 0
    d: dict[str, int] = {}
    for p in parts:
        p = LinearTerm.of(p)
        const += p.const
        for v, c in p.coeffs:
            d[v] = d.get(v, 0) + c
    return LinearTerm(const, d)


def _monomial(v: str, c: int) -> str:
    return v if c == 1 else f"{c}*{v}"


def format_term(t: LinearTerm) -> str:
    """Render in the text grammar; variables in natural order, constant last."""
    parts: list[tuple[int, str]] = []
    for v, c in sorted(t.coeffs, key=lambda vc: natural_key(vc[0])):
        parts.append((1 if c > 0 else -1, _monomial(v, abs(c))))
    if t.const or not parts:
        parts.append((1 if t.const >= 0 else -1, str(abs(t.const))))
    sign, first = parts[0]
    out = first if sign > 0 else ("-" + first if first.isdigit() else "0 - " + first)
    for sign, p in parts[1:]:
        out += (" + " if sign > 0 else " - ") + p
    return out
