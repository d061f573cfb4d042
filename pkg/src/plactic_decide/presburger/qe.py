"""Quantifier elimination for Presburger arithmetic over the integers.

Variables are eliminated one at a time from negation normal form.  In order
of preference a variable is removed by

1. substitution, when a conjunct is an equation in it;
2. splitting a disjunctive conjunct (bounded lazy DNF);
3. the integer shadow, when every lower/upper bound pair has a unit
   coefficient on one side (then the real shadow is exact);
4. Cooper's method, using the side (lower or upper) with fewer boundary points.
"""
from __future__ import annotations

from math import gcd, prod
from typing import Sequence

from . import formula as F
from .evaluate import holds
from .formula import (
    AND,
    ATOMS,
    DIV,
    EQ,
    EXISTS,
    FALSE_K,
    FORALL,
    IFF,
    IMPLIES,
    LE,
    NOT,
    OR,
    TRUE_K,
    BudgetExceeded,
    DEFAULT_BUDGET,
    Formula,
)
from .simplify import Simplifier
from .terms import LinearTerm

SPLIT_LIMIT = 64


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


class NotASentence(ValueError):
    pass


def nnf(f: Formula, memo: dict | None = None) -> Formula:
    """Negation normal form of a quantifier-free formula.

    Negations survive only on divisibility atoms; negated equations become
    pairs of strict bounds.
    """
    if memo is None:
        memo = {}
    return _nnf(f, True, memo)


def _nnf(f: Formula, pos: bool, memo: dict) -> Formula:
    key = (id(f), pos)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    k = f.kind
    if k in (TRUE_K, FALSE_K):
        r = f if pos else F.not_(f)
    elif k in ATOMS:
        if pos:
            r = f
        elif k == LE:
            r = F.not_(f)
        elif k == EQ:
            t = f.term
            r = F.or_(F.le_atom(t + 1), F.le_atom(-t + 1))
        else:
            r = F.not_(f)
    elif k == NOT:
        r = _nnf(f.args[0], not pos, memo)
    elif k == AND or k == OR:
        parts = [_nnf(a, pos, memo) for a in f.args]
        r = F.and_(*parts) if (k == AND) == pos else F.or_(*parts)
    elif k == IMPLIES:
        a, b = f.args
        if pos:
            r = F.or_(_nnf(a, False, memo), _nnf(b, True, memo))
        else:
            r = F.and_(_nnf(a, True, memo), _nnf(b, False, memo))
    elif k == IFF:
        a, b = f.args
        if pos:
            r = F.or_(F.and_(_nnf(a, True, memo), _nnf(b, True, memo)),
                      F.and_(_nnf(a, False, memo), _nnf(b, False, memo)))
        else:
            r = F.or_(F.and_(_nnf(a, True, memo), _nnf(b, False, memo)),
                      F.and_(_nnf(a, False, memo), _nnf(b, True, memo)))
    else:
        raise ValueError("nnf expects a quantifier-free formula")
    memo[key] = (f, r)
    return r


def _scale_subst(f: Formula, x: str, s: LinearTerm, c: int, memo: dict) -> Formula:
    """``f`` with ``x`` replaced by ``s / c`` (``c > 0``, divisibility asserted elsewhere)."""
    if x not in f.free_vars:
        return f
    hit = memo.get(id(f))
    if hit is not None:
        return hit[1]
    if f.kind in ATOMS:
        t = f.term
        a = t.coeff(x)
        new = t.without(x) * c + s * a
        if f.kind == DIV:
            r = F.div_atom(f.modulus * c, new)
        else:
            r = F.rebuild_atom(f, new)
    else:
        r = F.rebuild(f, [_scale_subst(g, x, s, c, memo) for g in f.args])
    memo[id(f)] = (f, r)
    return r


def _is_literal(f: Formula) -> bool:
    return f.kind in ATOMS or (f.kind == NOT and f.args[0].kind in ATOMS)


def _atom_of(lit: Formula) -> Formula:
    return lit.args[0] if lit.kind == NOT else lit


class Eliminator:
    """Stateful QE driver; memo tables live as long as one decision."""

    def __init__(self):
        self.simp = Simplifier()
        self.nnf_memo: dict = {}
        self.qe_memo: dict = {}

    # -- public entry points ---------------------------------------------------
    def qe(self, f: Formula) -> Formula:
        hit = self.qe_memo.get(id(f))
        if hit is not None:
            return hit[1]
        k = f.kind
        if k == EXISTS:
            r = self.eliminate_block(f.data, self.qe(f.args[0]))
        elif k == FORALL:
            inner = F.not_(self.qe(f.args[0]))
            r = F.not_(self.eliminate_block(f.data, inner))
        elif f.args:
            r = self.simp(F.rebuild(f, [self.qe(a) for a in f.args]))
        else:
            r = f
        self.qe_memo[id(f)] = (f, r)
        return r

    def eliminate_block(self, xs: Sequence[str], body: Formula) -> Formula:
        """Quantifier-free equivalent of ``exists xs. body`` (``body`` quantifier-free)."""
        todo = [x for x in xs if x in body.free_vars]
        phi = self.simp(nnf(body, self.nnf_memo))
        while todo:
            x = self._pick(todo, phi)
            todo.remove(x)
            phi = self.simp(self._elim(x, phi))
            todo = [y for y in todo if y in phi.free_vars]
        return phi

    # -- variable choice -----------------------------------------------------------
    def _pick(self, xs: list[str], phi: Formula) -> str:
        if len(xs) == 1:
            return xs[0]
        score = {x: [2, 0] for x in xs}
        for a in F.atoms(phi):
            for v, c in a.term.coeffs:
                s = score.get(v)
                if s is None:
                    continue
                s[1] += 1
                if a.kind == EQ:
                    s[0] = min(s[0], 0 if abs(c) == 1 else 1)
        return min(xs, key=lambda x: (score[x][0], score[x][1]))

    # -- elimination of one variable --------------------------------------------------
    def _elim(self, x: str, phi: Formula) -> Formula:
        if x not in phi.free_vars:
            return phi
        if phi.kind == OR:
            return F.or_(*[self._elim(x, d) for d in phi.args])
        conjuncts = phi.args if phi.kind == AND else (phi,)
        inside = [c for c in conjuncts if x in c.free_vars]
        outside = [c for c in conjuncts if x not in c.free_vars]
        return F.and_(*outside, self._elim_conj(x, inside))

    def _elim_conj(self, x: str, conjuncts: list[Formula]) -> Formula:
        eqs = [c for c in conjuncts if c.kind == EQ]
        if eqs:
            e = min(eqs, key=lambda c: abs(c.term.coeff(x)))
            a = e.term.coeff(x)
            # a*x + r = 0  =>  x = -r / a
            s = -e.term.without(x)
            if a < 0:
                a, s = -a, -s
            rest = F.and_(*[c for c in conjuncts if c is not e])
            return F.and_(F.div_atom(a, s), _scale_subst(rest, x, s, a, {}))

        compound = [c for c in conjuncts if not _is_literal(c)]
        if compound:
            sizes = [len(c.args) if c.kind == OR else 1 for c in compound]
            if prod(sizes) <= SPLIT_LIMIT:
                split = min((c for c in compound if c.kind == OR), key=lambda c: len(c.args))
                rest = [c for c in conjuncts if c is not split]
                return F.or_(*[self._elim(x, self.simp(F.and_(*rest, d))) for d in split.args])
            return self._cooper(x, F.and_(*conjuncts))

        lowers, uppers, divs = [], [], False
        for c in conjuncts:
            atom = _atom_of(c)
            if atom.kind == DIV:
                divs = True
            elif atom.term.coeff(x) > 0:
                uppers.append(atom)
            else:
                lowers.append(atom)
        if not divs:
            if not lowers or not uppers:
                return F.TRUE
            exact = all(
                lo.term.coeff(x) == -1 or up.term.coeff(x) == 1 for lo in lowers for up in uppers
            )
            if exact:
                return self._shadow(x, lowers, uppers)
        return self._cooper(x, F.and_(*conjuncts))

    @staticmethod
    def _shadow(x: str, lowers: list[Formula], uppers: list[Formula]) -> Formula:
        out = []
        for lo in lowers:
            p = -lo.term.coeff(x)  # p*x >= r1 where lo: -p*x + r1 <= 0
            r1 = lo.term.without(x)
            for up in uppers:
                q = up.term.coeff(x)  # q*x <= -r2
                r2 = up.term.without(x)
                out.append(F.le_atom(r1 * q + r2 * p))
        return F.and_(*out)

    def _cooper(self, x: str, phi: Formula) -> Formula:
        atoms = [a for a in F.atoms(phi) if x in a.free_vars]
        L = 1
        for a in atoms:
            L = _lcm(L, abs(a.term.coeff(x)))

        memo: dict = {}

        def unit(g: Formula) -> Formula:
            if x not in g.free_vars:
                return g
            hit = memo.get(id(g))
            if hit is not None:
                return hit[1]
            if g.kind in ATOMS:
                t = g.term
                a = t.coeff(x)
                m = L // abs(a)
                new = t.without(x) * m + LinearTerm.var(x, 1 if a > 0 else -1)
                r = F.div_atom(g.modulus * m, new) if g.kind == DIV else F.rebuild_atom(g, new)
            else:
                r = F.rebuild(g, [unit(h) for h in g.args])
            memo[id(g)] = (g, r)
            return r

        psi = unit(phi)
        if L > 1:
            psi = F.and_(psi, F.div_atom(L, LinearTerm.var(x)))

        delta = 1
        lower_pts: list[LinearTerm] = []
        upper_pts: list[LinearTerm] = []
        for a in F.atoms(psi):
            c = a.term.coeff(x)
            if not c:
                continue
            if a.kind == DIV:
                delta = _lcm(delta, a.modulus)
                continue
            r = a.term.without(x)
            if a.kind == EQ:
                val = -r if c == 1 else r  # x = val
                lower_pts.append(val - 1)
                upper_pts.append(val + 1)
            elif c == -1:  # x >= r
                lower_pts.append(r - 1)
            else:  # x <= -r
                upper_pts.append(-r + 1)

        left = len(lower_pts) <= len(upper_pts)
        inf_memo: dict = {}

        def at_infinity(g: Formula) -> Formula:
            if x not in g.free_vars:
                return g
            hit = inf_memo.get(id(g))
            if hit is not None:
                return hit[1]
            if g.kind == LE:
                up = g.term.coeff(x) > 0
                r = F.TRUE if up == left else F.FALSE
            elif g.kind == EQ:
                r = F.FALSE
            elif g.kind == DIV:
                r = g
            else:
                r = F.rebuild(g, [at_infinity(h) for h in g.args])
            inf_memo[id(g)] = (g, r)
            return r

        psi_inf = at_infinity(psi)
        pts = lower_pts if left else upper_pts
        sign = 1 if left else -1
        out = []
        for j in range(1, delta + 1):
            out.append(F.substitute(psi_inf, {x: LinearTerm(sign * j)}))
        for j in range(1, delta + 1):
            for p in dict.fromkeys(pts):
                out.append(F.substitute(psi, {x: p + sign * j}))
        return F.or_(*out)


def eliminate(q: Formula) -> Formula:
    """Quantifier-free equivalent of ``exists x. phi`` with ``phi`` quantifier-free."""
    if q.kind != EXISTS:
        raise ValueError("eliminate expects an existential formula")
    body = q.args[0]
    if any(g.kind in (EXISTS, FORALL) for g in _nodes(body)):
        raise ValueError("eliminate expects a quantifier-free body")
    return Eliminator().eliminate_block(q.data, body)


def _nodes(f: Formula):
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        stack.extend(g.args)


def quantifier_free(f: Formula) -> Formula:
    """Eliminate every quantifier of ``f`` (free variables are kept)."""
    return Eliminator().qe(f)


def decide(f: Formula, budget: int | None = DEFAULT_BUDGET) -> bool:
    """Truth of a Presburger sentence over the integers.

    Raises :class:`BudgetExceeded` when more than ``budget`` formula nodes are
    live, which is reported separately from a verdict.
    """
    if f.free_vars:
        raise NotASentence(f"free variables {sorted(f.free_vars)}")
    with F.node_budget(budget):
        g = Eliminator().qe(f)
    if g.free_vars:
        raise AssertionError("elimination left free variables")
    return holds(g, {})


__all__ = [
    "BudgetExceeded",
    "Eliminator",
    "NotASentence",
    "decide",
    "eliminate",
    "nnf",
    "quantifier_free",
]
