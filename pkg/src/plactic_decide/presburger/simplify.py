"""Equivalence-preserving simplification.

Beyond what the constructors already do, conjunctions and disjunctions of
linear literals are merged per linear form (bounds are intersected or joined,
matching bounds become equalities), and literals inside nested subformulas are
decided against the bounds known from their siblings.
"""
from __future__ import annotations

from . import formula as F
from .formula import AND, EQ, LE, NOT, OR, Formula
from .terms import LinearTerm

_MAX_PASSES = 8


def _key(t: LinearTerm):
    """Split ``t`` as ``sign * L + c`` with ``L`` having positive leading coefficient."""
    coeffs = t.coeffs
    if coeffs[0][1] > 0:
        return coeffs, 1, t.const
    return tuple((v, -c) for v, c in coeffs), -1, t.const


def _lin(key) -> LinearTerm:
    return LinearTerm(0, key)


class _Bounds:
    """Interval knowledge about linear forms."""

    __slots__ = ("iv",)

    def __init__(self, iv=None):
        self.iv: dict = dict(iv or {})

    def copy(self):
        return _Bounds(self.iv)

    def add(self, lit: Formula) -> bool:
        """Record a literal; False if it makes the knowledge inconsistent."""
        if lit.kind not in (LE, EQ):
            return True
        key, s, c = _key(lit.term)
        lo, hi = self.iv.get(key, (None, None))
        if lit.kind == EQ:
            val = -c  # s is always 1 for canonical equalities
            lo = val if lo is None else max(lo, val)
            hi = val if hi is None else min(hi, val)
        elif s > 0:
            hi = -c if hi is None else min(hi, -c)
        else:
            lo = c if lo is None else max(lo, c)
        self.iv[key] = (lo, hi)
        return lo is None or hi is None or lo <= hi

    def decide(self, lit: Formula):
        """True/False when the literal is settled by the bounds, else None."""
        neg = False
        if lit.kind == NOT and lit.args[0].kind == EQ:
            lit, neg = lit.args[0], True
        if lit.kind not in (LE, EQ):
            return None
        key, s, c = _key(lit.term)
        iv = self.iv.get(key)
        if iv is None:
            return None
        lo, hi = iv
        r = None
        if lit.kind == EQ:
            val = -c
            if (lo is not None and val < lo) or (hi is not None and val > hi):
                r = False
            elif lo == hi == val:
                r = True
        elif s > 0:  # L <= -c
            if hi is not None and hi <= -c:
                r = True
            elif lo is not None and lo > -c:
                r = False
        else:  # L >= c
            if lo is not None and lo >= c:
                r = True
            elif hi is not None and hi < c:
                r = False
        if r is None:
            return None
        return (not r) if neg else r

    def literals(self) -> list[Formula]:
        out = []
        for key, (lo, hi) in self.iv.items():
            lin = _lin(key)
            if lo is not None and lo == hi:
                out.append(F.eq_atom(lin - lo))
                continue
            if lo is not None:
                out.append(F.le_atom(lo - lin))
            if hi is not None:
                out.append(F.le_atom(lin - hi))
        return out


def _is_literal(f: Formula) -> bool:
    return f.is_atom or (f.kind == NOT and f.args[0].is_atom)


def _under(f: Formula, facts: _Bounds, memo: dict) -> Formula:
    """Replace literals of ``f`` settled by ``facts``."""
    r = memo.get(id(f))
    if r is not None:
        return r
    if _is_literal(f):
        d = facts.decide(f)
        r = f if d is None else F.const(d)
    elif f.kind in (AND, OR):
        r = F.rebuild(f, [_under(a, facts, memo) for a in f.args])
    else:
        r = f
    memo[id(f)] = r
    return r


class Simplifier:
    def __init__(self):
        self.memo: dict[int, tuple[Formula, Formula]] = {}

    def __call__(self, f: Formula) -> Formula:
        prev = None
        for _ in range(_MAX_PASSES):
            if f is prev:
                break
            prev, f = f, self.run(f)
        return f

    def run(self, f: Formula) -> Formula:
        hit = self.memo.get(id(f))
        if hit is not None:
            return hit[1]
        k = f.kind
        if k == AND:
            r = self._conj([self.run(a) for a in f.args])
        elif k == OR:
            r = self._disj([self.run(a) for a in f.args])
        elif f.args:
            r = F.rebuild(f, [self.run(a) for a in f.args])
        else:
            r = f
        self.memo[id(f)] = (f, r)
        return r

    def _conj(self, parts: list[Formula]) -> Formula:
        f = F.and_(*parts)
        if f.kind != AND:
            return f
        facts = _Bounds()
        kept: list[Formula] = []
        rest: list[Formula] = []
        for a in f.args:
            if a.kind in (LE, EQ):
                if not facts.add(a):
                    return F.FALSE
            elif _is_literal(a):
                kept.append(a)
            else:
                rest.append(a)
        lits = facts.literals()
        for a in kept:
            d = facts.decide(a)
            if d is False:
                return F.FALSE
            if d is None:
                lits.append(a)
        if facts.iv and rest:
            memo: dict = {}
            rest = [_under(a, facts, memo) for a in rest]
        return F.and_(*lits, *rest)

    def _disj(self, parts: list[Formula]) -> Formula:
        f = F.or_(*parts)
        if f.kind != OR:
            return f
        # merge one-sided bounds on the same linear form: keep the loosest
        ups: dict = {}
        lows: dict = {}
        other: list[Formula] = []
        for a in f.args:
            if a.kind == LE:
                key, s, c = _key(a.term)
                if s > 0:
                    ups[key] = max(ups.get(key, -c), -c)
                else:
                    lows[key] = min(lows.get(key, c), c)
            else:
                other.append(a)
        for key in ups.keys() & lows.keys():
            if lows[key] <= ups[key] + 1:
                return F.TRUE
        lits = [F.le_atom(_lin(key) - h) for key, h in ups.items()]
        lits += [F.le_atom(l - _lin(key)) for key, l in lows.items()]
        # later disjuncts may assume the literal disjuncts are false
        negs = _Bounds()
        for a in lits:
            negs.add(F.not_(a))
        if negs.iv and other:
            memo: dict = {}
            other = [_under(a, negs, memo) for a in other]
        return F.or_(*lits, *other)


def simplify(f: Formula) -> Formula:
    return Simplifier()(f)
