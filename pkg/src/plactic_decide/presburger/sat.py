"""Satisfiability search for existential Presburger formulas.

Existentially quantified variables become unknowns.  Conjunctions are asserted
literal by literal: equations with a unit coefficient are solved and
substituted away, other literals tighten interval bounds on their linear form,
and bounds are propagated to variables.  Disjunctions whose disjuncts are all
but one refuted by the bounds are committed; the rest are branched on,
depth first.  Before each branch and at each leaf the asserted literals are
checked for integer feasibility with exact elimination, so the search is a
decision procedure; the bounds only prune.

Universal subformulas (which cannot be unknowns) are removed by quantifier
elimination once reached.
"""
from __future__ import annotations

import itertools
from math import gcd
from typing import Iterable, Iterator, Mapping

from . import formula as F
from .evaluate import holds
from .formula import AND, DIV, EQ, EXISTS, FALSE_K, FORALL, IFF, IMPLIES, LE, NOT, OR, TRUE_K, Formula
from .terms import LinearTerm

_MISSING = object()


def _floordiv(a: int, b: int) -> int:
    return a // b


def _ceildiv(a: int, b: int) -> int:
    return -((-a) // b)


def prenex_polarity(f: Formula, memo: dict | None = None, pos: bool = True) -> Formula:
    """Negation normal form through quantifiers.

    Negation is left only on divisibility atoms; a negated equation becomes a
    disjunction of two strict bounds.
    """
    if memo is None:
        memo = {}
    key = (id(f), pos)
    hit = memo.get(key)
    if hit is not None:
        return hit[1]
    k = f.kind
    if k in (TRUE_K, FALSE_K):
        r = f if pos else F.not_(f)
    elif k == LE:
        r = f if pos else F.not_(f)
    elif k == EQ:
        r = f if pos else F.or_(F.le_atom(f.term + 1), F.le_atom(-f.term + 1))
    elif k == DIV:
        r = f if pos else F.not_(f)
    elif k == NOT:
        r = prenex_polarity(f.args[0], memo, not pos)
    elif k in (AND, OR):
        parts = [prenex_polarity(a, memo, pos) for a in f.args]
        r = F.and_(*parts) if (k == AND) == pos else F.or_(*parts)
    elif k == IMPLIES:
        a, b = f.args
        if pos:
            r = F.or_(prenex_polarity(a, memo, False), prenex_polarity(b, memo, True))
        else:
            r = F.and_(prenex_polarity(a, memo, True), prenex_polarity(b, memo, False))
    elif k == IFF:
        a, b = f.args
        pa, pb = prenex_polarity(a, memo, True), prenex_polarity(b, memo, True)
        na, nb = prenex_polarity(a, memo, False), prenex_polarity(b, memo, False)
        if pos:
            r = F.or_(F.and_(pa, pb), F.and_(na, nb))
        else:
            r = F.or_(F.and_(pa, nb), F.and_(na, pb))
    else:
        body = prenex_polarity(f.args[0], memo, pos)
        exists = (k == EXISTS) == pos
        r = (F.exists if exists else F.forall)(list(f.data), body)
    memo[key] = (f, r)
    return r


def is_existential(f: Formula, memo: dict | None = None) -> bool:
    """No universal quantifier in the negation normal form of ``f``."""
    g = prenex_polarity(f, memo)
    seen: set[int] = set()
    stack = [g]
    while stack:
        h = stack.pop()
        if id(h) in seen:
            continue
        seen.add(id(h))
        if h.kind == FORALL:
            return False
        stack.extend(h.args)
    return True


def key_vars(key) -> Iterator[str]:
    return (v for v, _ in key)


def _age(v: str) -> tuple:
    _, _, n = v.rpartition("#")
    return (int(n) if n.isdigit() else -1, v)


def _split(t: LinearTerm):
    """``t = s*g*L + c`` with ``L`` primitive and positive leading coefficient."""
    coeffs = t.coeffs
    g = 0
    for _, c in coeffs:
        g = gcd(g, c)
    s = 1 if coeffs[0][1] > 0 else -1
    sg = s * g
    key = tuple((v, c // sg) for v, c in coeffs)
    return key, s, g, t.const


# Value splits are tried before disjunction branching, up to this many per
# search; they only reorder the search, so any finite number keeps it complete.
SPLIT_BUDGET = 256
SPLIT_CAP = 8


class Conflict(Exception):
    pass


class SatSearch:
    def __init__(self, budget: int | None = F.DEFAULT_BUDGET):
        self.budget = budget
        self.steps = 0
        self.counter = itertools.count()
        self.sub: dict[str, LinearTerm] = {}
        self.bounds: dict[tuple, list] = {}  # key -> [lo, hi]
        self.occ: dict[str, dict] = {}  # var -> keys mentioning it (ordered, for determinism)
        self.divs: dict[int, tuple] = {}  # id -> (modulus, term, positive)
        self.trail: list = []
        self.queue: list = []
        self.memo_nnf: dict = {}
        self.splits_left = SPLIT_BUDGET
        # change clock: a variable's stamp is the clock value of the last
        # tightening that could affect literals over it (never rolled back)
        self.clock = 0
        self.stamp: dict[str, int] = {}
        self.dirty: list[str] = []
        self._pending: list = []

    # -- trail ---------------------------------------------------------------------
    def _set(self, d: dict, key, value) -> None:
        self.trail.append((d, key, d.get(key, _MISSING)))
        d[key] = value

    def _undo(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            item = trail.pop()
            if item[0] == "occ+":
                self.occ[item[1]].pop(item[2], None)
            elif item[0] == "occ-":
                self.occ[item[1]][item[2]] = None
            else:
                d, key, old = item
                if old is _MISSING:
                    del d[key]
                else:
                    d[key] = old

    def _occ_add(self, v: str, key) -> None:
        s = self.occ.get(v)
        if s is None:
            s = {}
            self._set(self.occ, v, s)
        if key not in s:
            s[key] = None
            self.trail.append(("occ+", v, key))

    def _occ_remove(self, v: str, key) -> None:
        s = self.occ.get(v)
        if s is not None and key in s:
            del s[key]
            self.trail.append(("occ-", v, key))

    def _tick(self) -> None:
        self.steps += 1
        if self.budget is not None and self.steps > self.budget:
            raise F.BudgetExceeded(f"satisfiability search exceeded {self.budget} steps")

    # -- terms ---------------------------------------------------------------------
    def resolve(self, v: str) -> LinearTerm | None:
        """Value of a solved variable in terms of unsolved ones (None if unsolved).

        Solved values are stored triangularly and flattened on demand; the
        flattened value is written back through the trail.
        """
        sub = self.sub
        e = sub.get(v)
        if e is None:
            return None
        if not any(w in sub for w, _ in e.coeffs):
            return e
        order: list[str] = []
        seen = {v}
        stack = [v]
        while stack:  # collect solved variables reachable from v, children first
            w = stack[-1]
            pushed = False
            for u, _ in sub[w].coeffs:
                if u in sub and u not in seen:
                    seen.add(u)
                    stack.append(u)
                    pushed = True
            if not pushed:
                stack.pop()
                order.append(w)
        for w in order:
            ew = sub[w]
            if any(u in sub for u, _ in ew.coeffs):
                const = ew.const
                acc: dict[str, int] = {}
                for u, c in ew.coeffs:
                    eu = sub.get(u)
                    if eu is None:
                        acc[u] = acc.get(u, 0) + c
                    else:
                        const += c * eu.const
                        for y, d in eu.coeffs:
                            acc[y] = acc.get(y, 0) + c * d
                self._set(sub, w, LinearTerm(const, {y: c for y, c in acc.items() if c}))
        return sub[v]

    def norm(self, t: LinearTerm, ctx: Mapping[str, str]) -> LinearTerm:
        const = t.const
        acc: dict[str, int] = {}
        sub = self.sub
        for v, c in t.coeffs:
            key = ctx.get(v, v)
            e = self.resolve(key) if key in sub else None
            if e is None:
                acc[key] = acc.get(key, 0) + c
            else:
                const += c * e.const
                for w, d in e.coeffs:
                    acc[w] = acc.get(w, 0) + c * d
        return LinearTerm(const, {v: c for v, c in acc.items() if c})

    def var_iv(self, v: str):
        b = self.bounds.get(((v, 1),))
        return (None, None) if b is None else b

    def range_of(self, t: LinearTerm):
        """Interval of a normalized term from variable and form bounds."""
        if t.is_const:
            return t.const, t.const
        key, s, g, c = _split(t)
        b = self.bounds.get(key)
        lo = hi = None
        if b is not None:
            blo, bhi = b
            sg = s * g
            if sg > 0:
                lo = None if blo is None else sg * blo + c
                hi = None if bhi is None else sg * bhi + c
            else:
                lo = None if bhi is None else sg * bhi + c
                hi = None if blo is None else sg * blo + c
        vlo = vhi = t.const
        for v, a in t.coeffs:
            ilo, ihi = self.var_iv(v)
            if a > 0:
                vlo = None if vlo is None or ilo is None else vlo + a * ilo
                vhi = None if vhi is None or ihi is None else vhi + a * ihi
            else:
                vlo = None if vlo is None or ihi is None else vlo + a * ihi
                vhi = None if vhi is None or ilo is None else vhi + a * ilo
        if vlo is not None:
            lo = vlo if lo is None else max(lo, vlo)
        if vhi is not None:
            hi = vhi if hi is None else min(hi, vhi)
        return lo, hi

    # -- assertions ------------------------------------------------------------------
    def assert_le(self, t: LinearTerm) -> None:
        """``t <= 0`` (normalized)."""
        if t.is_const:
            if t.const > 0:
                raise Conflict
            return
        key, s, g, c = _split(t)
        if s > 0:
            self._bound(key, None, _floordiv(-c, g))
        else:
            self._bound(key, _ceildiv(c, g), None)

    def assert_eq(self, t: LinearTerm) -> None:
        if t.is_const:
            if t.const:
                raise Conflict
            return
        units = [v for v, c in t.coeffs if c in (1, -1)]
        if units:
            # solve for the newest variable so outer ones stay as the basis
            v = max(units, key=_age)
            c = t.coeff(v)
            self._substitute(v, t.without(v) * (-c))
            return
        key, s, g, c = _split(t)
        if c % g:
            raise Conflict
        val = -c // (s * g)
        self._bound(key, val, val)

    def assert_div(self, modulus: int, t: LinearTerm, positive: bool) -> None:
        if t.is_const:
            if (t.const % modulus == 0) != positive:
                raise Conflict
            return
        self._set(self.divs, next(self.counter), (modulus, t, positive))

    def _touch(self, names) -> None:
        self.clock += 1
        for v in names:
            self.stamp[v] = self.clock
            self.dirty.append(v)

    def _bound(self, key, lo, hi) -> None:
        cur = self.bounds.get(key)
        olo, ohi = (None, None) if cur is None else cur
        nlo = olo if lo is None or (olo is not None and olo >= lo) else lo
        nhi = ohi if hi is None or (ohi is not None and ohi <= hi) else hi
        if cur is not None and nlo == olo and nhi == ohi:
            return
        if nlo is not None and nhi is not None and nlo > nhi:
            raise Conflict
        self._touch(v for v, _ in key)
        self._set(self.bounds, key, [nlo, nhi])
        if cur is None:
            for v, _ in key:
                self._occ_add(v, key)
        if nlo is not None and nlo == nhi:
            lin = LinearTerm(-nlo, key)
            if any(c in (1, -1) for _, c in key):
                self._drop(key)
                self.assert_eq(lin)
                return
        if len(key) == 1:
            v = key[0][0]
            for k2 in list(self.occ.get(v, ())):
                if len(k2) > 1:
                    self.queue.append(k2)
        else:
            self.queue.append(key)

    def _drop(self, key) -> None:
        self._set(self.bounds, key, None)
        del self.bounds[key]  # the trail restores it
        for v, _ in key:
            self._occ_remove(v, key)

    def _substitute(self, x: str, e: LinearTerm) -> None:
        self._tick()
        if x in e.variables:
            raise AssertionError("cyclic substitution")
        self._set(self.sub, x, e)
        self._touch((x,))
        affected = list(self.occ.get(x, ()))
        redo = []
        for key in affected:
            b = self.bounds.get(key)
            if b is None:
                continue
            redo.append((key, b))
            self._drop(key)
        for i, (m, t, p) in list(self.divs.items()):
            if t.coeff(x):
                nt = self.norm(t, {})
                self._set(self.divs, i, (m, nt, p))
                if nt.is_const and (nt.const % m == 0) != p:
                    raise Conflict
        for key, (lo, hi) in redo:
            # normalize now: an earlier re-assertion may have solved more variables
            lin = self.norm(LinearTerm(0, key), {})
            if lo is not None and lo == hi:
                self.assert_eq(lin - lo)
                continue
            if lo is not None:
                self.assert_le(lo - lin)
            if hi is not None:
                self.assert_le(lin - hi)

    def propagate(self) -> None:
        rounds = 0
        while self.queue:
            key = self.queue.pop()
            b = self.bounds.get(key)
            if b is None or len(key) == 1:
                continue
            rounds += 1
            if rounds > 20000:
                self.queue.clear()
                return
            lo, hi = b
            ivs = [self.var_iv(v) for v, _ in key]
            # min and max of each term a*v
            mins, maxs = [], []
            for (v, a), (ilo, ihi) in zip(key, ivs):
                if a > 0:
                    mins.append(None if ilo is None else a * ilo)
                    maxs.append(None if ihi is None else a * ihi)
                else:
                    mins.append(None if ihi is None else a * ihi)
                    maxs.append(None if ilo is None else a * ilo)
            nmin = sum(1 for m in mins if m is None)
            nmax = sum(1 for m in maxs if m is None)
            smin = sum(m for m in mins if m is not None)
            smax = sum(m for m in maxs if m is not None)
            if hi is not None and nmin == 0 and smin > hi:
                raise Conflict
            if lo is not None and nmax == 0 and smax < lo:
                raise Conflict
            for i, (v, a) in enumerate(key):
                # a*v <= hi - (sum of other mins);  a*v >= lo - (sum of other maxs)
                up = dn = None
                if hi is not None:
                    others_none = nmin - (mins[i] is None)
                    if others_none == 0:
                        rest = smin - (mins[i] or 0)
                        up = hi - rest
                if lo is not None:
                    others_none = nmax - (maxs[i] is None)
                    if others_none == 0:
                        rest = smax - (maxs[i] or 0)
                        dn = lo - rest
                vlo = vhi = None
                if a > 0:
                    if up is not None:
                        vhi = _floordiv(up, a)
                    if dn is not None:
                        vlo = _ceildiv(dn, a)
                else:
                    if up is not None:
                        vlo = _ceildiv(up, a)
                    if dn is not None:
                        vhi = _floordiv(dn, a)
                if vlo is None and vhi is None:
                    continue
                ilo, ihi = self.var_iv(v)
                if (vlo is not None and (ilo is None or vlo > ilo)) or (vhi is not None and (ihi is None or vhi < ihi)):
                    if v in self.sub:
                        continue
                    self._bound(((v, 1),), vlo, vhi)

    # -- probing ---------------------------------------------------------------------------
    def refuted(self, f: Formula, ctx: Mapping[str, str]) -> bool:
        return self.residue(f, ctx) is None

    def residue(self, f: Formula, ctx: Mapping[str, str], watch: set | None = None):
        """None if ``f`` is refuted by the bounds, else the set of its conjuncts
        not yet settled (normalized literals, or opaque subformulas).

        Variables of unsettled literals are added to ``watch``; only a change
        to one of them can alter the answer.
        """
        parts = f.args if f.kind == AND else (f,)
        out = set()
        for p in parts:
            k = p.kind
            if k == TRUE_K:
                continue
            if k == FALSE_K:
                return None
            if k == LE or k == EQ:
                t = self.norm(p.term, ctx)
                lo, hi = self.range_of(t)
                if k == LE:
                    if lo is not None and lo > 0:
                        return None
                    if hi is not None and hi <= 0:
                        continue
                    key, sgn, g, c = _split(t)
                    out.add((LE, key, _floordiv(-c, g) if sgn > 0 else -_ceildiv(c, g), sgn))
                    if watch is not None:
                        watch.update(key_vars(key))
                else:
                    if (lo is not None and lo > 0) or (hi is not None and hi < 0):
                        return None
                    if lo == 0 and hi == 0:
                        continue
                    if t.const % t.content():
                        return None
                    key, sgn, g, c = _split(t)
                    out.add((EQ, key, -c // (sgn * g)))
                    if watch is not None:
                        watch.update(key_vars(key))
            elif k == DIV:
                t = self.norm(p.term, ctx)
                if t.is_const:
                    if t.const % p.modulus:
                        return None
                    continue
                out.add((DIV, p.modulus, t))
                if watch is not None:
                    watch.update(key_vars(t.coeffs))
            else:
                out.add((id(p), id(ctx)))
        return frozenset(out)

    def viable(self, f: Formula, ctx: Mapping[str, str], watch: set | None = None) -> list[Formula]:
        """Disjuncts of ``f`` not refuted, minus those subsumed by a weaker one."""
        found = []
        for a in f.args:
            r = self.residue(a, ctx, watch)
            if r is not None:
                if not r:
                    return [F.TRUE]
                found.append((a, r))
        if len(found) < 2:
            return [a for a, _ in found]
        found.sort(key=lambda item: len(item[1]))
        kept: list = []
        for a, r in found:
            if not any(r2 <= r for _, r2 in kept):
                kept.append((a, r))
        return [a for a, _ in kept]

    def fresh(self, f: Formula, ctx: Mapping[str, str]) -> dict:
        ctx2 = dict(ctx)
        n = next(self.counter)
        for v in f.data:
            ctx2[v] = f"{v}#{n}"
        return ctx2

    # -- the search ----------------------------------------------------------------------------
    def run(self, f: Formula, env: Mapping[str, int] | None = None) -> bool:
        g = prenex_polarity(f, self.memo_nnf)
        try:
            for v, val in (env or {}).items():
                self._substitute(v, LinearTerm(val))
        except Conflict:
            return False
        return self._solve([(g, {})], [])

    def _solve(self, stack: list, deferred: list) -> bool:
        mark = len(self.trail)
        try:
            ok = self._search(stack, deferred)
        except Conflict:
            ok = False
        if not ok:
            self._undo(mark)
            self.queue.clear()
        return ok

    def _defer(self, f: Formula, ctx: Mapping[str, str], out: list) -> None:
        """Commit or refute the disjunction ``f``, else record it in ``out``
        as ``(f, ctx, clock, watched variables, number of viable disjuncts)``."""
        watch: set = set()
        clock = self.clock
        viable = self.viable(f, ctx, watch)
        if not viable:
            raise Conflict
        if len(viable) == 1:
            self._assert_all([(viable[0], ctx)])
        else:
            out.append((f, ctx, clock, watch, len(viable)))

    def _stale(self, entry) -> bool:
        clock, stamp = entry[2], self.stamp
        return any(stamp.get(v, -1) > clock for v in entry[3])

    def _assert_all(self, stack: list) -> None:
        pending = self._pending
        while stack:
            self._tick()
            f, ctx = stack.pop()
            k = f.kind
            if k == AND:
                stack.extend((a, ctx) for a in reversed(f.args))
            elif k == TRUE_K:
                continue
            elif k == FALSE_K:
                raise Conflict
            elif k == LE:
                self.assert_le(self.norm(f.term, ctx))
            elif k == EQ:
                self.assert_eq(self.norm(f.term, ctx))
            elif k == DIV:
                self.assert_div(f.modulus, self.norm(f.term, ctx), True)
            elif k == NOT:  # only on divisibility after normalization
                a = f.args[0]
                self.assert_div(a.modulus, self.norm(a.term, ctx), False)
            elif k == OR:
                pending.append((f, ctx))
            elif k == EXISTS:
                stack.append((f.args[0], self.fresh(f, ctx)))
            elif k == FORALL:
                stack.append((self._eliminate_universal(f, ctx), {}))
            else:
                raise AssertionError(f"unexpected node {k}")
            if self.queue:
                self.propagate()

    def _search(self, stack: list, deferred: list) -> bool:
        self._pending = []
        self.dirty = []
        self._assert_all(list(stack))
        live: dict[int, tuple] = {}
        watchers: dict[str, list[int]] = {}
        ids = itertools.count()

        def add(found: list) -> None:
            for entry in found:
                i = next(ids)
                live[i] = entry
                for v in entry[3]:
                    watchers.setdefault(v, []).append(i)

        add(deferred)
        while True:
            if self._pending:
                f, ctx = self._pending.pop()
                found: list = []
                self._defer(f, ctx, found)
                add(found)
                continue
            if not self.dirty:
                break
            moved = set(self.dirty)
            self.dirty.clear()
            hit = {i for v in moved for i in watchers.get(v, ()) if i in live}
            for i in sorted(hit):
                entry = live.get(i)
                if entry is None or not self._stale(entry):
                    continue
                del live[i]
                found = []
                self._defer(entry[0], entry[1], found)
                add(found)
        entries = list(live.values())
        if not entries:
            return self._feasible()
        return self._branch(entries)

    def _branch(self, entries: list) -> bool:
        idx = min(range(len(entries)), key=lambda i: entries[i][4])
        f, ctx = entries[idx][0], entries[idx][1]
        viable = self.viable(f, ctx)
        rest = entries[:idx] + entries[idx + 1:]
        if not self._feasible():
            return False
        if self.splits_left > 0:
            split = self._split_var(itertools.chain.from_iterable(e[3] for e in entries))
            if split is not None:
                self.splits_left -= 1
                v, lo = split
                x = LinearTerm.var(v)
                pinned = F.eq_atom(x - lo)
                raised = F.le_atom(LinearTerm(lo + 1) - x)
                return self._solve([(pinned, {})], entries) or self._solve([(raised, {})], entries)
        for a in viable:
            if self._solve([(a, ctx)], rest):
                return True
        return False

    def _split_var(self, candidates: Iterable[str]):
        """Earliest-introduced unknown with a small finite lower bound.

        Outer quantifiers are introduced first; in the formulas of interest the
        inner ones are functions of them, so fixing outer values lets
        propagation settle the rest.
        """
        best = None
        for v in set(candidates):
            if v in self.sub:
                continue
            lo, _ = self.var_iv(v)
            if lo is None or abs(lo) > SPLIT_CAP:
                continue
            rank = _age(v)
            if best is None or rank < best[0]:
                best = (rank, v, lo)
        return None if best is None else (best[1], best[2])

    def _eliminate_universal(self, f: Formula, ctx: Mapping[str, str]) -> Formula:
        from .qe import Eliminator

        mapping = {v: self.norm(LinearTerm.var(v), ctx) for v in f.free_vars}
        g = F.substitute(f, mapping)
        return prenex_polarity(Eliminator().qe(g), self.memo_nnf)

    def literals(self) -> list[Formula]:
        out = []
        for key, (lo, hi) in self.bounds.items():
            lin = LinearTerm(0, key)
            if lo is not None and lo == hi:
                out.append(F.eq_atom(lin - lo))
                continue
            if lo is not None:
                out.append(F.le_atom(lo - lin))
            if hi is not None:
                out.append(F.le_atom(lin - hi))
        for m, t, p in self.divs.values():
            a = F.div_atom(m, t)
            out.append(a if p else F.not_(a))
        return out

    def _feasible(self) -> bool:
        """Exact integer feasibility of the asserted literals."""
        from .fm import feasible
        from .qe import Eliminator

        les, eqs, multi = [], [], False
        for key, (lo, hi) in self.bounds.items():
            if len(key) > 1:
                multi = True
            lin = LinearTerm(0, key)
            if lo is not None and lo == hi:
                eqs.append(lin - lo)
                continue
            if lo is not None:
                les.append(lo - lin)
            if hi is not None:
                les.append(lin - hi)
        if not multi and not self.divs:
            return True  # independent nonempty intervals
        if not self.divs:
            r = feasible(les, eqs)
            if r is not None:
                return r
        body = F.and_(*self.literals())
        g = Eliminator().eliminate_block(sorted(body.free_vars), body)
        return holds(g, {})

    def model(self) -> dict[str, int] | None:
        """Not provided: the search proves satisfiability without building a model."""
        return None


def satisfiable(f: Formula, env: Mapping[str, int] | None = None, budget: int | None = F.DEFAULT_BUDGET) -> bool:
    """Whether ``f`` (free variables taken from ``env``) holds; exact for any formula,
    efficient when its quantifiers are existential."""
    missing = [v for v in f.free_vars if v not in (env or {})]
    if missing:
        raise ValueError(f"no value for free variables {sorted(missing)}")
    with F.node_budget(budget):
        return SatSearch(budget).run(f, env)


__all__ = ["SatSearch", "is_existential", "prenex_polarity", "satisfiable"]
