"""Integer feasibility of conjunctions of linear constraints.

Equations with a unit coefficient are substituted away; the remaining
inequalities are eliminated Fourier-Motzkin style, one variable at a time,
but only when every lower/upper pair has a unit coefficient on one side
(then the real shadow equals the integer shadow).  When that fails, ``None``
is returned and the caller falls back to full elimination.
"""
from __future__ import annotations

import heapq
from math import gcd
from typing import Iterable

from .terms import LinearTerm

Coeffs = tuple


def _ceildiv(a: int, b: int) -> int:
    return -((-a) // b)


class _System:
    """Inequalities ``L + c <= 0`` keyed by ``L`` with per-variable occurrence
    counts, so the cheapest exact variable is found without rescanning."""

    def __init__(self):
        self.les: dict[Coeffs, int] = {}
        self.occ: dict[str, dict] = {}
        self.stats: dict[str, list] = {}  # var -> [lowers, uppers, non-unit lowers, non-unit uppers]
        self.heap: list = []
        self.done: set[str] = set()

    def cost(self, v: str) -> int | None:
        nlo, nup, lnu, unu = self.stats[v]
        if not nlo or not nup:
            return 0  # one-sided: drop its constraints
        if lnu and unu:
            return None  # some pair would need a dark shadow
        return (nlo - 1) * (nup - 1) + 1  # net growth + 2, always positive

    def _touch(self, v: str) -> None:
        c = self.cost(v)
        if c is not None:
            heapq.heappush(self.heap, (c, v))

    def _count(self, coeffs: Coeffs, d: int) -> None:
        for v, a in coeffs:
            st = self.stats.setdefault(v, [0, 0, 0, 0])
            side = 1 if a > 0 else 0
            st[side] += d
            if a not in (1, -1):
                st[side + 2] += d
            if d > 0:
                self.occ.setdefault(v, {})[coeffs] = None
            else:
                del self.occ[v][coeffs]
            if v not in self.done:
                self._touch(v)

    def remove(self, coeffs: Coeffs) -> int:
        c = self.les.pop(coeffs)
        self._count(coeffs, -1)
        return c

    def add_le(self, t: LinearTerm) -> bool:
        """Add ``t <= 0``; False on an immediate contradiction."""
        if t.is_const:
            return t.const <= 0
        g = 0
        for _, c in t.coeffs:
            g = gcd(g, c)
        coeffs = tuple((v, c // g) for v, c in t.coeffs) if g > 1 else t.coeffs
        c = _ceildiv(t.const, g) if g > 1 else t.const
        old = self.les.get(coeffs)
        if old is None or c > old:
            self.les[coeffs] = c
            if old is None:
                self._count(coeffs, 1)
            neg = tuple((v, -a) for v, a in coeffs)
            other = self.les.get(neg)
            if other is not None and c + other > 0:
                return False
        return True

    def pick(self) -> tuple[str, int] | None:
        heap = self.heap
        while heap:
            c, v = heapq.heappop(heap)
            if v in self.done or self.cost(v) != c:
                continue
            return v, c
        return None


def feasible(les: Iterable[LinearTerm], eqs: Iterable[LinearTerm] = ()) -> bool | None:
    """Whether ``les <= 0`` and ``eqs = 0`` have a common integer solution (None: undecided)."""
    eqs = list(eqs)
    les = list(les)
    while eqs:
        t = eqs.pop()
        if t.is_const:
            if t.const:
                return False
            continue
        g = t.content()
        if t.const % g:
            return False
        unit = next((v for v, c in t.coeffs if c in (1, -1)), None)
        if unit is None:
            return None
        a = t.coeff(unit)
        m = {unit: t.without(unit) * (-a)}
        eqs = [u.substitute(m) if u.coeff(unit) else u for u in eqs]
        les = [u.substitute(m) if u.coeff(unit) else u for u in les]
    sys = _System()
    for t in les:
        if not sys.add_le(t):
            return False
    limit = 20 * len(sys.les) + 10_000
    while sys.les:
        if len(sys.les) > limit:
            return None
        picked = sys.pick()
        if picked is None:
            return None
        v, cost = picked
        sys.done.add(v)
        lo, up = [], []
        for k in list(sys.occ.get(v, ())):
            a = dict(k)[v]
            rest = LinearTerm(sys.remove(k), tuple((w, b) for w, b in k if w != v))
            (up if a > 0 else lo).append((a, rest))
        if cost == 0:
            continue
        for a, r1 in lo:
            for b, r2 in up:
                if not sys.add_le(r1 * b + r2 * (-a)):
                    return False
    return True
