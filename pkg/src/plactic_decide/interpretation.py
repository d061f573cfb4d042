"""Presburger interpretation of the plactic monoid P_n.

An element of P_n is encoded by its exponent vector over the column alphabet
(see :mod:`plactic_decide.columns`).  This module builds the formulas defining
the encoding's domain, equality, and multiplication.  Multiplication for
n >= 3 is assembled from right multiplication by a letter power, which itself
is the composite

    a  -> (top a, bottom a)
       -> bottom a * x^m  split into its bumped row and new bottom row
       -> top a * bumped row          (multiplication one rank down)
       -> stitched back over the new bottom row.

Formulas use the free variables ``a1..ak``, ``b1..bk``, ``c1..ck`` and ``m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .columns import ColumnTable, alpha_beta, enumerate_columns, mask_of
from .presburger import formula as F
from .presburger.formula import Formula
from .presburger.terms import LinearTerm, term_sum

Vec = Sequence[LinearTerm]


def var_names(prefix: str, k: int) -> list[str]:
    return [f"{prefix}{i}" for i in range(1, k + 1)]


def var_vec(prefix: str, k: int) -> list[LinearTerm]:
    return [LinearTerm.var(v) for v in var_names(prefix, k)]


def const_vec(values: Sequence[int]) -> list[LinearTerm]:
    return [LinearTerm(int(x)) for x in values]


def _check_rank(n: int) -> None:
    if n < 1:
        raise ValueError("rank must be >= 1")


def _check_letter(n: int, x: int) -> None:
    if not 1 <= x <= n:
        raise ValueError(f"letter {x} outside [1, {n}]")


# Index sets --------------------------------------------------------------------

@lru_cache(maxsize=None)
def bottom_sets(n: int) -> dict[int, tuple[int, ...]]:
    """letter a -> indices of columns whose bottom (least) letter is a."""
    table = enumerate_columns(n)
    out: dict[int, list[int]] = {a: [] for a in range(1, n + 1)}
    for i, col in enumerate(table.columns, start=1):
        out[col[-1]].append(i)
    return {a: tuple(v) for a, v in out.items()}


@lru_cache(maxsize=None)
def top_sets(n: int) -> dict[int, tuple[int, ...]]:
    """column i -> indices of columns that become c_i once their bottom letter is removed."""
    table = enumerate_columns(n)
    out: dict[int, list[int]] = {i: [] for i in range(1, table.k + 1)}
    for j, col in enumerate(table.columns, start=1):
        if len(col) > 1:
            out[table.index_of(col[:-1])].append(j)
    return {i: tuple(v) for i, v in out.items()}


@lru_cache(maxsize=None)
def embedding(n: int) -> tuple[int, ...]:
    """Rank n-1 column index (position) -> rank n index of the same column shifted up by one.

    The top tableaux of P_n are the tableaux over {2..n}; shifting letters down
    by one identifies them with P_{n-1}.
    """
    if n < 2:
        return ()
    low = enumerate_columns(n - 1)
    table = enumerate_columns(n)
    return tuple(table.index_of(tuple(x + 1 for x in col)) for col in low.columns)


# Component formulas over arbitrary term vectors -------------------------------

def domain_formula(n: int, xs: Vec) -> Formula:
    table = enumerate_columns(n)
    parts = [F.le(0, x) for x in xs]
    for a, b in sorted(table.incompatible_pairs):
        parts.append(F.or_(F.eq(xs[a - 1], 0), F.eq(xs[b - 1], 0)))
    return F.and_(*parts)


def row_formula(n: int, xs: Vec) -> Formula:
    k = 2 ** n - 1
    return F.and_(*[F.eq(xs[i], 0) for i in range(k - n)])


def bottom_graph(n: int, a: Vec, b: Vec) -> Formula:
    table = enumerate_columns(n)
    parts = [row_formula(n, b)]
    for y, idx in bottom_sets(n).items():
        parts.append(F.eq(b[table.single(y) - 1], term_sum(a[j - 1] for j in idx)))
    return F.and_(*parts)


def top_graph(n: int, a: Vec, b: Vec) -> Formula:
    parts = []
    for i, idx in top_sets(n).items():
        parts.append(F.eq(b[i - 1], term_sum(a[j - 1] for j in idx)))
    return F.and_(*parts)


def _letters(n: int, v: Vec) -> list[LinearTerm]:
    """Letter counts (index 1..n; index 0 unused) of a row vector."""
    table = enumerate_columns(n)
    return [LinearTerm(0)] + [v[table.single(y) - 1] for y in range(1, n + 1)]


def rho_bottom_graph(n: int, x: int, m: LinearTerm, r: Vec, d: Vec) -> Formula:
    """Graph of  row r  ->  bottom row of r * x^m."""
    R = _letters(n, r)
    D = _letters(n, d)
    common = [row_formula(n, r), row_formula(n, d), F.le(0, m)]
    common += [F.eq(D[y], R[y]) for y in range(1, x)]
    common.append(F.eq(D[x], R[x] + m))
    cases = []
    span = n - x
    for i in range(1, span + 1):
        lo = term_sum(R[x + j] for j in range(1, i))
        hi = lo + R[x + i]
        parts = [F.le(lo, m), F.le(m, hi)]
        parts += [F.eq(D[x + j], 0) for j in range(1, i)]
        parts.append(F.eq(D[x + i], hi - m))
        parts += [F.eq(D[y], R[y]) for y in range(x + i + 1, n + 1)]
        cases.append(F.and_(*parts))
    total = term_sum(R[x + j] for j in range(1, span + 1))
    cases.append(F.and_(F.le(total, m), *[F.eq(D[x + j], 0) for j in range(1, span + 1)]))
    return F.and_(*common, F.or_(*cases))


def rho_top_graph(n: int, x: int, m: LinearTerm, r: Vec, c: Vec) -> Formula:
    """Graph of  row r  ->  row bumped out of r by x^m (the top of r * x^m)."""
    R = _letters(n, r)
    C = _letters(n, c)
    common = [row_formula(n, r), row_formula(n, c), F.le(0, m)]
    common += [F.eq(C[y], 0) for y in range(1, x + 1)]
    cases = []
    span = n - x
    for i in range(1, span + 1):
        lo = term_sum(R[x + j] for j in range(1, i))
        hi = lo + R[x + i]
        parts = [F.le(lo, m), F.le(m, hi)]
        parts += [F.eq(C[x + j], R[x + j]) for j in range(1, i)]
        parts.append(F.eq(C[x + i], m - lo))
        parts += [F.eq(C[y], 0) for y in range(x + i + 1, n + 1)]
        cases.append(F.and_(*parts))
    total = term_sum(R[x + j] for j in range(1, span + 1))
    cases.append(F.and_(F.le(total, m), *[F.eq(C[x + j], R[x + j]) for j in range(1, span + 1)]))
    return F.and_(*common, F.or_(*cases))


def stitch_compatible(n: int, a: Vec, b: Vec) -> Formula:
    """Top tableau ``a`` can sit directly on the row ``b``."""
    table = enumerate_columns(n)
    bsets = bottom_sets(n)
    parts = [domain_formula(n, a), domain_formula(n, b)]
    parts += [F.eq(a[i - 1], 0) for i in bsets[1]]
    parts.append(row_formula(n, b))
    B = _letters(n, b)
    e = [LinearTerm(0)] + [term_sum(a[j - 1] for j in bsets[y]) for y in range(1, n + 1)]
    for i in range(1, n + 1):
        parts.append(F.le(term_sum(e[1:i + 1]), term_sum(B[1:i])))
    del table
    return F.and_(*parts)


def stitch_graph(n: int, a: Vec, b: Vec, d: Vec) -> Formula:
    """Graph of the stitch of top tableau ``a`` over row ``b``.

    Columns of the result are formed in column order; each takes as many
    copies as both its upper part (from ``a``) and its bottom letter (from
    ``b``) still allow.  The remaining amounts are carried as linear terms.
    """
    table = enumerate_columns(n)
    left_a = list(a)
    left_b = list(b)
    parts = [stitch_compatible(n, a, b)]
    for i, col in enumerate(table.columns, start=1):
        di = d[i - 1]
        ib = table.single(col[-1]) - 1
        rb = left_b[ib]
        if len(col) == 1:
            parts.append(F.eq(di, rb))
        else:
            it = table.index_of(col[:-1]) - 1
            ra = left_a[it]
            parts.append(F.or_(F.and_(F.le(ra, rb), F.eq(di, ra)),
                               F.and_(F.le(rb, ra), F.eq(di, rb))))
            left_a[it] = ra - di
        left_b[ib] = rb - di
    return F.and_(*parts)


def eta_explicit(n: int, a: Vec, b: Vec, c: Vec) -> Formula:
    """Closed-form multiplication for ranks 1 and 2."""
    doms = [domain_formula(n, a), domain_formula(n, b), domain_formula(n, c)]
    if n == 1:
        return F.and_(*doms, F.eq(c[0], a[0] + b[0]))
    if n == 2:
        a1, a2, a3 = a
        b1, b2, b3 = b
        c1, c2, c3 = c
        case1 = F.and_(F.le(a3, b2), F.eq(c1, a1 + b1 + a3), F.eq(c2, a2 + b2 - a3), F.eq(c3, b3))
        case2 = F.and_(F.le(b2, a3), F.eq(c1, a1 + b1 + b2), F.eq(c2, a2), F.eq(c3, b3 + a3 - b2))
        return F.and_(*doms, F.or_(case1, case2))
    raise ValueError("closed form only for ranks 1 and 2")


# Canonical formulas ----------------------------------------------------------------

def content_relation(n: int, a: Vec, b: Vec, c: Vec) -> Formula:
    """Letter counts of ``c`` are those of ``a`` plus those of ``b``.

    Content is a homomorphism to (N^n, +), so this is implied by the product
    graph; adding it lets a solver bound the factors of a known product.
    """
    table = enumerate_columns(n)
    eqs = []
    for letter in range(1, n + 1):
        idx = [i for i in range(1, table.k + 1) if letter in table.column(i)]
        t = term_sum(a[i - 1] + b[i - 1] - c[i - 1] for i in idx)
        eqs.append(F.eq(t, 0))
    return F.and_(*eqs)


def build_domain(n: int) -> Formula:
    _check_rank(n)
    return domain_formula(n, var_vec("a", 2 ** n - 1))


def build_equality(n: int) -> Formula:
    _check_rank(n)
    k = 2 ** n - 1
    a, b = var_vec("a", k), var_vec("b", k)
    return F.and_(domain_formula(n, a), domain_formula(n, b), *[F.eq(x, y) for x, y in zip(a, b)])


def build_bottom(n: int) -> Formula:
    _check_rank(n)
    k = 2 ** n - 1
    return bottom_graph(n, var_vec("a", k), var_vec("b", k))


def build_top(n: int) -> Formula:
    _check_rank(n)
    k = 2 ** n - 1
    return top_graph(n, var_vec("a", k), var_vec("b", k))


def build_rho(n: int, x: int) -> tuple[Formula, Formula]:
    """(top-row graph, bottom-row graph) of ``r -> r * x^m`` over ``m``, ``a`` (row in), ``b`` (out)."""
    _check_rank(n)
    _check_letter(n, x)
    k = 2 ** n - 1
    m = LinearTerm.var("m")
    r, out = var_vec("a", k), var_vec("b", k)
    return rho_top_graph(n, x, m, r, out), rho_bottom_graph(n, x, m, r, out)


def build_stitch(n: int) -> Formula:
    _check_rank(n)
    k = 2 ** n - 1
    return stitch_graph(n, var_vec("a", k), var_vec("b", k), var_vec("c", k))


def instantiate(f: Formula, **vectors: Vec) -> Formula:
    """Substitute term vectors for the canonical variable blocks of ``f``.

    ``instantiate(eta, a=u, b=v, c=w)`` maps ``a1 -> u[0]`` and so on; ``m`` may be
    passed as a single term.
    """
    mapping: dict[str, LinearTerm] = {}
    for prefix, vec in vectors.items():
        if prefix == "m":
            mapping["m"] = LinearTerm.of(vec)
            continue
        for i, t in enumerate(vec, start=1):
            mapping[f"{prefix}{i}"] = LinearTerm.of(t)
    return F.substitute(f, mapping)


@lru_cache(maxsize=None)
def build_mu(n: int, x: int) -> Formula:
    """Graph of ``(m, a) -> a * x^m`` over ``m``, ``a1..ak`` and output ``b1..bk``."""
    _check_rank(n)
    _check_letter(n, x)
    k = 2 ** n - 1
    a, out = var_vec("a", k), var_vec("b", k)
    m = LinearTerm.var("m")
    tag = f"mu{n}x{x}s"
    blocks = {s: var_names(f"{tag}{s}_", k) for s in range(1, 6)}
    a1, a2, a3, a4, a5 = ([LinearTerm.var(v) for v in blocks[s]] for s in range(1, 6))
    parts = [
        top_graph(n, a, a1),
        bottom_graph(n, a, a2),
        rho_top_graph(n, x, m, a2, a3),
        rho_bottom_graph(n, x, m, a2, a4),
    ]
    ones = bottom_sets(n)[1]
    parts += [F.eq(a5[i - 1], 0) for i in ones]
    if n == 1:
        pass  # the only column contains 1, so the top part is always empty
    else:
        emb = embedding(n)
        pick = lambda vec: [vec[j - 1] for j in emb]  # noqa: E731
        parts.append(instantiate(build_eta(n - 1), a=pick(a1), b=pick(a3), c=pick(a5)))
    parts.append(stitch_graph(n, a5, a4, out))
    bound = [v for s in range(1, 6) for v in blocks[s]]
    return F.exists(bound, F.and_(*parts))


@lru_cache(maxsize=None)
def build_eta_chain(n: int) -> Formula:
    """Multiplication as the chain of right multiplications by the letter powers of ``b``."""
    _check_rank(n)
    k = 2 ** n - 1
    a, b, c = var_vec("a", k), var_vec("b", k), var_vec("c", k)
    alpha, beta = alpha_beta(n)
    ell = len(alpha)
    inner = [var_names(f"eta{n}c{i}_", k) for i in range(1, ell)]
    chain = [a] + [[LinearTerm.var(v) for v in blk] for blk in inner] + [c]
    steps = []
    for i in range(1, ell + 1):
        mu = build_mu(n, alpha[i - 1])
        steps.append(instantiate(mu, m=b[beta[i - 1] - 1], a=chain[i - 1], b=chain[i]))
    bound = [v for blk in inner for v in blk]
    doms = [domain_formula(n, a), domain_formula(n, b), domain_formula(n, c)]
    return F.and_(*doms, F.exists(bound, F.and_(*steps)))


@lru_cache(maxsize=None)
def build_eta(n: int) -> Formula:
    """Multiplication graph: ``phi(a) * phi(b) = phi(c)`` over ``a``, ``b``, ``c``."""
    _check_rank(n)
    if n <= 2:
        k = 2 ** n - 1
        return eta_explicit(n, var_vec("a", k), var_vec("b", k), var_vec("c", k))
    return build_eta_chain(n)


# The bundle ------------------------------------------------------------------------

@dataclass(frozen=True)
class Interpretation:
    n: int
    table: ColumnTable
    incompatible: frozenset
    bottom_sets: dict
    top_sets: dict
    alpha: tuple
    beta: tuple
    embed: tuple
    domain: Formula = field(repr=False)
    equality: Formula = field(repr=False)
    mu: dict = field(repr=False)
    eta: Formula = field(repr=False)
    lower: "Interpretation | None" = field(default=None, repr=False)

    @property
    def k(self) -> int:
        return self.table.k

    @property
    def I(self) -> frozenset:  # noqa: E743
        return self.incompatible

    def multiply_formula(self, a: Vec, b: Vec, c: Vec) -> Formula:
        return instantiate(self.eta, a=a, b=b, c=c)

    def content_formula(self, a: Vec, b: Vec, c: Vec) -> Formula:
        return content_relation(self.n, a, b, c)

    def equality_formula(self, a: Vec, b: Vec) -> Formula:
        return instantiate(self.equality, a=a, b=b)

    def domain_of(self, xs: Vec) -> Formula:
        return instantiate(self.domain, a=xs)


@lru_cache(maxsize=None)
def generate(n: int) -> Interpretation:
    """Build the full interpretation of P_n, recursing through the lower ranks."""
    _check_rank(n)
    lower = generate(n - 1) if n > 2 else None
    table = enumerate_columns(n)
    # the pairwise check is done by inserting each column pair
    from .tableaux import p_map

    incompatible = frozenset(
        (i, j)
        for i in range(1, table.k + 1)
        for j in range(i + 1, table.k + 1)
        if p_map(table.column(i) + table.column(j)).columns != (table.column(i), table.column(j))
    )
    assert incompatible == table.incompatible_pairs
    alpha, beta = alpha_beta(n)
    return Interpretation(
        n=n,
        table=table,
        incompatible=incompatible,
        bottom_sets=bottom_sets(n),
        top_sets=top_sets(n),
        alpha=alpha,
        beta=beta,
        embed=embedding(n),
        domain=build_domain(n),
        equality=build_equality(n),
        mu={x: build_mu(n, x) for x in range(1, n + 1)},
        eta=build_eta(n),
        lower=lower,
    )


__all__ = [
    "Interpretation",
    "build_bottom",
    "build_domain",
    "build_equality",
    "build_eta",
    "build_eta_chain",
    "build_mu",
    "build_rho",
    "build_stitch",
    "build_top",
    "generate",
    "instantiate",
    "mask_of",
]
