"""Ground evaluation and witness search.

Quantifier-free formulas are evaluated directly.  Quantifiers are handled by a
depth-first search that treats existentially quantified variables as unknowns:
equations with a single unknown assign it, disjunctions are probed and only
branched on when more than one disjunct survives, and a variable is enumerated
only when nothing else makes progress.  Enumeration needs either bounds
derivable from the remaining inequalities or an explicit witness ``bound``
(all quantifiers then range over ``[-bound, bound]``).
"""
from __future__ import annotations

import itertools
from typing import Iterator, Mapping, Sequence

from . import formula as F
from .formula import AND, DIV, EQ, EXISTS, FALSE_K, FORALL, IFF, IMPLIES, LE, NOT, OR, TRUE_K, Formula


class EvaluationError(ValueError):
    pass


def _atom_holds(f: Formula, value: int) -> bool:
    k = f.kind
    if k == LE:
        return value <= 0
    if k == EQ:
        return value == 0
    return value % f.modulus == 0


def holds(f: Formula, env: Mapping[str, int]) -> bool:
    """Evaluate a quantifier-free formula."""
    memo: dict[int, bool] = {}

    def go(g: Formula) -> bool:
        r = memo.get(id(g))
        if r is not None:
            return r
        k = g.kind
        if k == TRUE_K:
            r = True
        elif k == FALSE_K:
            r = False
        elif g.is_atom:
            try:
                r = _atom_holds(g, g.term.evaluate(env))
            except KeyError as e:
                raise EvaluationError(f"no value for variable {e.args[0]}") from None
        elif k == NOT:
            r = not go(g.args[0])
        elif k == AND:
            r = all(go(a) for a in g.args)
        elif k == OR:
            r = any(go(a) for a in g.args)
        elif k == IMPLIES:
            r = (not go(g.args[0])) or go(g.args[1])
        elif k == IFF:
            r = go(g.args[0]) == go(g.args[1])
        else:
            raise EvaluationError("quantifier met in a quantifier-free evaluation")
        memo[id(g)] = r
        return r

    return go(f)


class _Search:
    def __init__(self, bound: int | None):
        self.bound = bound
        self.counter = itertools.count()

    # -- helpers ---------------------------------------------------------
    @staticmethod
    def _status(f: Formula, ctx: dict, env: dict):
        t = f.term
        total = t.const
        nunk = 0
        unk = None
        for v, c in t.coeffs:
            key = ctx.get(v, v)
            val = env.get(key)
            if val is None:
                nunk += 1
                unk = (key, c)
            else:
                total += c * val
        return total, nunk, unk

    def _keys(self, f: Formula, ctx: dict) -> set:
        return {ctx.get(v, v) for v in f.free_vars}

    def _known(self, f: Formula, ctx: dict, env: dict) -> bool:
        return all(ctx.get(v, v) in env for v in f.free_vars)

    def _probe(self, f: Formula, ctx: dict, env: dict):
        """False if ``f`` is already refuted, a dict of forced assignments if it is a
        conjunction of atoms that is decided up to single-unknown equations, else None."""
        parts = f.args if f.kind == AND else (f,)
        forced: dict = {}
        complete = True
        local = env
        for p in parts:
            k = p.kind
            if k == TRUE_K:
                continue
            if k == FALSE_K:
                return False
            if not p.is_atom:
                complete = False
                continue
            total, nunk, unk = self._status(p, ctx, local)
            if nunk == 0:
                if not _atom_holds(p, total):
                    return False
            elif nunk == 1 and k == EQ:
                key, c = unk
                if total % c:
                    return False
                val = -total // c
                if self.bound is not None and abs(val) > self.bound:
                    return False
                if local is env:
                    local = dict(env)
                local[key] = val
                forced[key] = val
            else:
                complete = False
        return forced if complete else None

    def fresh_ctx(self, f: Formula, ctx: dict, unknowns: set) -> dict:
        ctx2 = dict(ctx)
        n = next(self.counter)
        for v in f.data:
            key = f"{v}#{n}"
            ctx2[v] = key
            unknowns.add(key)
        return ctx2

    # -- truth of a formula whose free variables are all known -----------------
    def truth(self, f: Formula, ctx: dict, env: dict) -> bool:
        k = f.kind
        if k == TRUE_K:
            return True
        if k == FALSE_K:
            return False
        if f.is_atom:
            total, nunk, _ = self._status(f, ctx, env)
            if nunk:
                raise EvaluationError("unassigned variable in atom")
            return _atom_holds(f, total)
        if k == NOT:
            return not self.truth(f.args[0], ctx, env)
        if k == AND:
            return all(self.truth(a, ctx, env) for a in f.args)
        if k == OR:
            return any(self.truth(a, ctx, env) for a in f.args)
        if k == IMPLIES:
            return (not self.truth(f.args[0], ctx, env)) or self.truth(f.args[1], ctx, env)
        if k == IFF:
            return self.truth(f.args[0], ctx, env) == self.truth(f.args[1], ctx, env)
        unknowns: set = set()
        ctx2 = self.fresh_ctx(f, ctx, unknowns)
        body = f.args[0] if k == EXISTS else F.not_(f.args[0])
        found = next(self.solve([(body, ctx2)], dict(env), unknowns), None) is not None
        return found if k == EXISTS else not found

    # -- the search ---------------------------------------------------------------
    def solve(self, stack: list, env: dict, unknowns: set) -> Iterator[dict]:
        deferred: list = []
        progress = False
        while True:
            while stack:
                f, ctx = stack.pop()
                k = f.kind
                if k == AND:
                    stack.extend((a, ctx) for a in reversed(f.args))
                elif k == TRUE_K:
                    pass
                elif k == FALSE_K:
                    return
                elif k == LE or k == EQ or k == DIV:
                    total, nunk, unk = self._status(f, ctx, env)
                    if nunk == 0:
                        if not _atom_holds(f, total):
                            return
                    elif nunk == 1 and k == EQ:
                        key, c = unk
                        if total % c:
                            return
                        val = -total // c
                        if key not in unknowns:
                            raise EvaluationError(f"no value for free variable {key}")
                        if self.bound is not None and abs(val) > self.bound:
                            return
                        env[key] = val
                        progress = True
                    else:
                        deferred.append((f, ctx))
                elif k == OR:
                    viable = []
                    for a in f.args:
                        p = self._probe(a, ctx, env)
                        if p is not False:
                            viable.append((a, p))
                    if not viable:
                        return
                    if len(viable) == 1 or (
                        all(isinstance(p, dict) for _, p in viable)
                        and all(p == viable[0][1] for _, p in viable)
                    ):
                        stack.append((viable[0][0], ctx))
                    else:
                        deferred.append((f, ctx))
                elif k == EXISTS:
                    stack.append((f.args[0], self.fresh_ctx(f, ctx, unknowns)))
                elif k == IMPLIES:
                    stack.append((F.or_(F.not_(f.args[0]), f.args[1]), ctx))
                elif k == NOT and f.args[0].kind in (AND, OR, IMPLIES):
                    g = f.args[0]
                    if g.kind == AND:
                        stack.append((F.or_(*[F.not_(a) for a in g.args]), ctx))
                    elif g.kind == OR:
                        stack.append((F.and_(*[F.not_(a) for a in g.args]), ctx))
                    else:
                        stack.append((F.and_(g.args[0], F.not_(g.args[1])), ctx))
                else:
                    # NOT of atom/quantifier, FORALL, IFF: wait until fully known
                    if self._known(f, ctx, env):
                        if not self.truth(f, ctx, env):
                            return
                    else:
                        deferred.append((f, ctx))
            if not deferred:
                yield env
                return
            if progress:
                stack = deferred[::-1]
                deferred = []
                progress = False
                continue
            yield from self._branch(deferred, env, unknowns)
            return

    def _branch(self, deferred: list, env: dict, unknowns: set) -> Iterator[dict]:
        best = None
        for idx, (f, ctx) in enumerate(deferred):
            if f.kind == OR:
                viable = [a for a in f.args if self._probe(a, ctx, env) is not False]
                if best is None or len(viable) < len(best[1]):
                    best = (idx, viable, ctx)
        if best is not None:
            idx, viable, ctx = best
            rest = deferred[:idx] + deferred[idx + 1:]
            for a in viable:
                yield from self.solve(rest[::-1] + [(a, ctx)], dict(env), unknowns)
            return
        key, lo, hi = self._pick_variable(deferred, env, unknowns)
        for val in range(lo, hi + 1):
            env2 = dict(env)
            env2[key] = val
            yield from self.solve(deferred[::-1], env2, unknowns)

    def _pick_variable(self, deferred, env, unknowns):
        bounds: dict = {}
        candidates: list = []
        for f, ctx in deferred:
            for key in self._keys(f, ctx):
                if key not in env:
                    if key not in unknowns:
                        raise EvaluationError(f"no value for free variable {key}")
                    if key not in bounds:
                        bounds[key] = [None, None]
                        candidates.append(key)
            if f.kind == LE:
                total, nunk, unk = self._status(f, ctx, env)
                if nunk == 1:
                    # c*x + total <= 0
                    key, c = unk
                    lo, hi = bounds[key]
                    if c > 0:
                        ub = (-total) // c
                        bounds[key][1] = ub if hi is None else min(hi, ub)
                    else:
                        lb = -(total // c)
                        bounds[key][0] = lb if lo is None else max(lo, lb)
        best = None
        for key in candidates:
            lo, hi = bounds[key]
            if self.bound is not None:
                lo = -self.bound if lo is None else max(lo, -self.bound)
                hi = self.bound if hi is None else min(hi, self.bound)
            if lo is None or hi is None:
                continue
            width = hi - lo
            if best is None or width < best[2] - best[1]:
                best = (key, lo, hi)
        if best is None:
            raise EvaluationError("quantified variable has no finite range; supply a witness bound")
        return best


def evaluate(f: Formula, env: Mapping[str, int] | None = None, bound: int | None = None) -> bool:
    """Truth value of ``f`` under ``env``.

    Quantified variables are found by search; when a variable must be enumerated
    the ``bound`` restricts every quantifier to ``[-bound, bound]``.
    """
    env = dict(env or {})
    missing = [v for v in f.free_vars if v not in env]
    if missing:
        raise EvaluationError(f"no value for free variables {sorted(missing)}")
    return _Search(bound).truth(f, {}, env)


def solutions(
    f: Formula,
    env: Mapping[str, int] | None,
    variables: Sequence[str],
    bound: int | None = None,
    limit: int | None = None,
) -> list[tuple[int, ...]]:
    """All assignments to ``variables`` making ``f`` true (sorted, deduplicated)."""
    env = dict(env or {})
    variables = tuple(variables)
    missing = [v for v in f.free_vars if v not in env and v not in variables]
    if missing:
        raise EvaluationError(f"no value for free variables {sorted(missing)}")
    search = _Search(bound)
    found: set[tuple[int, ...]] = set()
    unknowns = {v for v in variables if v not in env}
    for sol in search.solve([(f, {})], env, set(unknowns)):
        free = [v for v in variables if v not in sol]
        if free:
            if bound is None:
                raise EvaluationError(f"variables {free} are unconstrained; supply a bound")
            for vals in itertools.product(range(-bound, bound + 1), repeat=len(free)):
                full = dict(sol)
                full.update(zip(free, vals))
                found.add(tuple(full[v] for v in variables))
        else:
            found.add(tuple(sol[v] for v in variables))
        if limit is not None and len(found) >= limit:
            break
    return sorted(found)
