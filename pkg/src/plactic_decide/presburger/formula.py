"""Hash-consed formulas of linear integer arithmetic.

Every constructor returns the unique live node for its structure, so
structurally equal formulas are the same object and memo tables can be
keyed on identity.  Atoms are kept in a canonical form:

* ``LE``  -- ``t <= 0``
* ``EQ``  -- ``t = 0``, gcd-reduced, first coefficient positive
* ``DIV`` -- ``d | t``, coefficients reduced mod ``d``
"""
from __future__ import annotations

import itertools
import sys
import threading
import weakref
from contextlib import contextmanager
from math import gcd
from typing import Iterable, Mapping, Sequence

from .terms import LinearTerm, TermLike, format_term

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

TRUE_K, FALSE_K = "true", "false"
LE, EQ, DIV = "le", "eq", "div"
NOT, AND, OR, IMPLIES, IFF = "not", "and", "or", "implies", "iff"
EXISTS, FORALL = "exists", "forall"
ATOMS = frozenset({LE, EQ, DIV})
QUANTIFIERS = frozenset({EXISTS, FORALL})

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    """The live-node budget was exhausted; no verdict was reached."""


class Formula:
    __slots__ = ("kind", "args", "data", "_fv", "__weakref__")

    def __init__(self, kind: str, args: tuple, data):
        self.kind = kind
        self.args = args
        self.data = data
        self._fv = None

    # identity equality/hash (inherited from object) is exactly what hash-consing wants

    @property
    def is_atom(self) -> bool:
        return self.kind in ATOMS

    @property
    def term(self) -> LinearTerm:
        return self.data if self.kind != DIV else self.data[1]

    @property
    def modulus(self) -> int:
        return self.data[0]

    @property
    def bound_vars(self) -> tuple[str, ...]:
        return self.data

    @property
    def free_vars(self) -> frozenset[str]:
        fv = self._fv
        if fv is None:
            fv = self._fv = _free_vars(self)
        return fv

    def __repr__(self):
        s = to_text(self)
        return f"<Formula {s[:200] + ('...' if len(s) > 200 else '')}>"

    def __str__(self):
        return to_text(self)

    # light operator sugar for tests and builders
    def __and__(self, other):
        return and_(self, other)

    def __or__(self, other):
        return or_(self, other)

    def __invert__(self):
        return not_(self)


def _free_vars(f: Formula) -> frozenset[str]:
    k = f.kind
    if k in ATOMS:
        return frozenset(f.term.variables)
    if k in QUANTIFIERS:
        return f.args[0].free_vars - frozenset(f.data)
    if not f.args:
        return frozenset()
    if len(f.args) == 1:
        return f.args[0].free_vars
    return frozenset().union(*(a.free_vars for a in f.args))


# Hash-cons table -------------------------------------------------------------

_table: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()
_lock = threading.Lock()
_limit: int | None = None


def live_nodes() -> int:
    return len(_table)


@contextmanager
def node_budget(limit: int | None):
    """Raise :class:`BudgetExceeded` if more than ``limit`` nodes become live."""
    global _limit
    if limit is not None and limit <= 0:
        raise ValueError("budget must be positive")
    saved = _limit
    _limit = limit if saved is None or limit is None else min(limit, saved)
    try:
        yield
    finally:
        _limit = saved


def _mk(kind: str, args: tuple, data) -> Formula:
    key = (kind, args, data)
    node = _table.get(key)
    if node is not None:
        return node
    with _lock:
        node = _table.get(key)
        if node is None:
            if _limit is not None and len(_table) >= _limit:
                raise BudgetExceeded(f"formula engine exceeded {_limit} live nodes")
            node = Formula(kind, args, data)
            _table[key] = node
    return node


TRUE = _mk(TRUE_K, (), None)
FALSE = _mk(FALSE_K, (), None)


def const(b: bool) -> Formula:
    return TRUE if b else FALSE


# Atoms -----------------------------------------------------------------------

def le_atom(t: LinearTerm) -> Formula:
    """``t <= 0``."""
    if not t.coeffs:
        return const(t.const <= 0)
    g = t.content()
    if g > 1:
        t = LinearTerm(-((-t.const) // g), tuple((v, c // g) for v, c in t.coeffs))
    return _mk(LE, (), t)


def eq_atom(t: LinearTerm) -> Formula:
    """``t = 0``."""
    if not t.coeffs:
        return const(t.const == 0)
    g = t.content()
    if t.const % g:
        return FALSE
    sign = -1 if t.coeffs[0][1] < 0 else 1
    if g > 1 or sign < 0:
        g *= sign
        t = LinearTerm(t.const // g, tuple((v, c // g) for v, c in t.coeffs))
    return _mk(EQ, (), t)


def div_atom(d: int, t: LinearTerm) -> Formula:
    """``d | t``."""
    d = abs(d)
    if d == 0:
        return eq_atom(t)
    if d == 1:
        return TRUE
    coeffs = tuple((v, c % d) for v, c in t.coeffs if c % d)
    c0 = t.const % d
    if not coeffs:
        return const(c0 == 0)
    g = d
    for _, c in coeffs:
        g = gcd(g, c)
    if g > 1:
        if c0 % g:
            return FALSE
        d //= g
        if d == 1:
            return TRUE
        coeffs = tuple((v, c // g) for v, c in coeffs)
        c0 //= g
    return _mk(DIV, (), (d, LinearTerm(c0, coeffs)))


def le(lhs: TermLike, rhs: TermLike) -> Formula:
    return le_atom(LinearTerm.of(lhs) - rhs)


def lt(lhs: TermLike, rhs: TermLike) -> Formula:
    return le_atom(LinearTerm.of(lhs) - rhs + 1)


def ge(lhs: TermLike, rhs: TermLike) -> Formula:
    return le(rhs, lhs)


def eq(lhs: TermLike, rhs: TermLike) -> Formula:
    return eq_atom(LinearTerm.of(lhs) - rhs)


def divides(d: int, t: TermLike) -> Formula:
    return div_atom(d, LinearTerm.of(t))


def rebuild_atom(f: Formula, t: LinearTerm) -> Formula:
    if f.kind == LE:
        return le_atom(t)
    if f.kind == EQ:
        return eq_atom(t)
    return div_atom(f.modulus, t)


# Connectives -----------------------------------------------------------------

def not_(f: Formula) -> Formula:
    k = f.kind
    if k == TRUE_K:
        return FALSE
    if k == FALSE_K:
        return TRUE
    if k == NOT:
        return f.args[0]
    if k == LE:
        # not (t <= 0)  <=>  -t + 1 <= 0 over the integers
        return le_atom(-f.data + 1)
    return _mk(NOT, (f,), None)


def _nary(kind: str, unit: Formula, zero: Formula, fs: Iterable[Formula]) -> Formula:
    out: list[Formula] = []
    seen: set[int] = set()
    stack = list(fs)
    stack.reverse()
    while stack:
        f = stack.pop()
        if f is zero:
            return zero
        if f is unit:
            continue
        if f.kind == kind:
            stack.extend(reversed(f.args))
            continue
        if id(f) in seen:
            continue
        seen.add(id(f))
        out.append(f)
    if not out:
        return unit
    if len(out) == 1:
        return out[0]
    ids = seen
    for f in out:
        if f.kind == NOT and id(f.args[0]) in ids:
            return zero
        if f.kind == LE:
            neg = _table.get((LE, (), -f.data + 1))
            if neg is not None and id(neg) in ids:
                return zero
    return _mk(kind, tuple(out), None)


def and_(*fs: Formula) -> Formula:
    if len(fs) == 1 and not isinstance(fs[0], Formula):
        fs = tuple(fs[0])
    return _nary(AND, TRUE, FALSE, fs)


def or_(*fs: Formula) -> Formula:
    if len(fs) == 1 and not isinstance(fs[0], Formula):
        fs = tuple(fs[0])
    return _nary(OR, FALSE, TRUE, fs)


def implies(a: Formula, b: Formula) -> Formula:
    if a is FALSE or b is TRUE:
        return TRUE
    if a is TRUE:
        return b
    if b is FALSE:
        return not_(a)
    if a is b:
        return TRUE
    return _mk(IMPLIES, (a, b), None)


def iff(a: Formula, b: Formula) -> Formula:
    if a is b:
        return TRUE
    if a is TRUE:
        return b
    if b is TRUE:
        return a
    if a is FALSE:
        return not_(b)
    if b is FALSE:
        return not_(a)
    return _mk(IFF, (a, b), None)


def _quant(kind: str, vs: Sequence[str] | str, body: Formula) -> Formula:
    if isinstance(vs, str):
        vs = (vs,)
    fv = body.free_vars
    vs = tuple(dict.fromkeys(v for v in vs if v in fv))
    if not vs:
        return body
    if body.kind == kind:
        inner = body.data
        vs = tuple(v for v in vs if v not in inner) + inner
        body = body.args[0]
    return _mk(kind, (body,), vs)


def exists(vs: Sequence[str] | str, body: Formula) -> Formula:
    return _quant(EXISTS, vs, body)


def forall(vs: Sequence[str] | str, body: Formula) -> Formula:
    return _quant(FORALL, vs, body)


def rebuild(f: Formula, args: Sequence[Formula]) -> Formula:
    """Same connective as ``f`` over new children (constructors re-simplify)."""
    k = f.kind
    if k == NOT:
        return not_(args[0])
    if k == AND:
        return and_(*args)
    if k == OR:
        return or_(*args)
    if k == IMPLIES:
        return implies(*args)
    if k == IFF:
        return iff(*args)
    if k == EXISTS:
        return exists(f.data, args[0])
    if k == FORALL:
        return forall(f.data, args[0])
    raise ValueError(f"cannot rebuild {k}")


# Substitution ----------------------------------------------------------------

_fresh_counter = itertools.count()


def fresh_name(base: str = "v") -> str:
    return f"{base}_{next(_fresh_counter)}"


def substitute(f: Formula, mapping: Mapping[str, TermLike]) -> Formula:
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    mapping = {v: LinearTerm.of(t) for v, t in mapping.items()}
    if not mapping:
        return f
    return _subst(f, mapping, {})


def _subst(f: Formula, mapping: dict, memo: dict) -> Formula:
    fv = f.free_vars
    if fv.isdisjoint(mapping):
        return f
    r = memo.get(id(f))
    if r is not None:
        return r[1]
    k = f.kind
    if k in ATOMS:
        r = rebuild_atom(f, f.term.substitute(mapping))
    elif k in QUANTIFIERS:
        bound = f.data
        inner = {v: t for v, t in mapping.items() if v not in bound and v in fv}
        body = f.args[0]
        used = set()
        for t in inner.values():
            used.update(t.variables)
        clash = [v for v in bound if v in used]
        if clash:
            ren = {v: fresh_name(v.split("_")[0] or "v") for v in clash}
            body = _subst(body, {v: LinearTerm.var(n) for v, n in ren.items()}, {})
            bound = tuple(ren.get(v, v) for v in bound)
        r = _quant(k, bound, _subst(body, inner, {}) if inner else body)
    else:
        r = rebuild(f, [_subst(a, mapping, memo) for a in f.args])
    memo[id(f)] = (f, r)
    return r


def rename(f: Formula, mapping: Mapping[str, str]) -> Formula:
    return substitute(f, {a: LinearTerm.var(b) for a, b in mapping.items()})


# Size measures ---------------------------------------------------------------

def dag_size(f: Formula) -> int:
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        stack.extend(g.args)
    return len(seen)


def tree_size(f: Formula) -> int:
    memo: dict[int, int] = {}

    def go(g: Formula) -> int:
        r = memo.get(id(g))
        if r is None:
            r = memo[id(g)] = 1 + sum(go(a) for a in g.args)
        return r

    return go(f)


def atoms(f: Formula) -> list[Formula]:
    seen: set[int] = set()
    out = []
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if g.kind in ATOMS:
            out.append(g)
        else:
            stack.extend(g.args)
    return out


# Text rendering --------------------------------------------------------------

def _atom_text(f: Formula) -> str:
    if f.kind == DIV:
        return f"{f.modulus} | {format_term(f.term)}"
    t = f.term
    pos = LinearTerm(0, tuple((v, c) for v, c in t.coeffs if c > 0))
    neg = LinearTerm(-t.const, tuple((v, -c) for v, c in t.coeffs if c < 0))
    op = "<=" if f.kind == LE else "="
    return f"{format_term(pos)} {op} {format_term(neg)}"


def to_text(f: Formula) -> str:
    """Render ``f`` in the Presburger text grammar (tree-expanded)."""
    memo: dict[int, str] = {}

    def go(g: Formula) -> str:
        s = memo.get(id(g))
        if s is not None:
            return s
        k = g.kind
        if k == TRUE_K:
            s = "true"
        elif k == FALSE_K:
            s = "false"
        elif k in ATOMS:
            s = _atom_text(g)
        elif k == NOT:
            s = "!(" + go(g.args[0]) + ")"
        elif k == AND:
            s = "(" + " & ".join(go(a) for a in g.args) + ")"
        elif k == OR:
            s = "(" + " or ".join(go(a) for a in g.args) + ")"
        elif k == IMPLIES:
            s = "(" + go(g.args[0]) + " -> " + go(g.args[1]) + ")"
        elif k == IFF:
            s = "(" + go(g.args[0]) + " <-> " + go(g.args[1]) + ")"
        else:
            prefix = "".join(f"{k} {v}. " for v in g.data)
            s = "(" + prefix + go(g.args[0]) + ")"
        memo[id(g)] = s
        return s

    return go(f)
