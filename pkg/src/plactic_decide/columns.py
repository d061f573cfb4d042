"""The column alphabet of P_n, its rewriting system and exponent-vector normal forms.

Columns are nonempty subsets of [n]; they are stored as bitmasks (bit ``i-1``
set when letter ``i`` is present) and exposed as strictly decreasing words.
Columns are indexed from 1 in length-decreasing-lexicographic order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

from .tableaux import EMPTY, Tableau, Word, check_word, p_map

Column = Word  # strictly decreasing


def mask_of(col: Iterable[int]) -> int:
    m = 0
    for x in col:
        m |= 1 << (x - 1)
    return m


def word_of(mask: int) -> Column:
    return tuple(sorted((i + 1 for i in range(mask.bit_length()) if mask >> i & 1), reverse=True))


def is_column(w: Sequence[int]) -> bool:
    return len(w) > 0 and all(w[i] > w[i + 1] for i in range(len(w) - 1))


def compatible(a: Column, b: Column) -> bool:
    """True when ``a`` may stand directly left of ``b`` in a tableau."""
    if len(a) < len(b):
        return False
    # compare bottom-aligned entries
    return all(x <= y for x, y in zip(reversed(a), reversed(b)))


def column_key(col: Column) -> tuple:
    return (-len(col), col)


@dataclass(frozen=True)
class ColumnTable:
    n: int
    masks: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.masks)

    @cached_property
    def columns(self) -> tuple[Column, ...]:
        return tuple(word_of(m) for m in self.masks)

    @cached_property
    def index(self) -> dict[int, int]:
        """Bitmask -> 1-based index."""
        return {m: i + 1 for i, m in enumerate(self.masks)}

    def index_of(self, col: Column) -> int:
        return self.index[mask_of(col)]

    def column(self, i: int) -> Column:
        return self.columns[i - 1]

    def single(self, letter: int) -> int:
        """Index of the one-letter column ``letter``."""
        return self.k - self.n + letter

    @cached_property
    def incompatible_pairs(self) -> frozenset[tuple[int, int]]:
        cols = self.columns
        return frozenset(
            (i + 1, j + 1)
            for i in range(self.k)
            for j in range(i + 1, self.k)
            if not compatible(cols[i], cols[j])
        )


@lru_cache(maxsize=None)
def enumerate_columns(n: int) -> ColumnTable:
    if n < 1:
        raise ValueError("rank must be >= 1")
    cols = sorted((word_of(m) for m in range(1, 1 << n)), key=column_key)
    table = ColumnTable(n, tuple(mask_of(c) for c in cols))
    assert table.columns[-n:] == tuple((x,) for x in range(1, n + 1))
    return table


class InvalidExponentVector(ValueError):
    pass


@dataclass(frozen=True)
class ExponentVector:
    n: int
    v: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        table = enumerate_columns(self.n)
        if len(self.v) != table.k:
            raise InvalidExponentVector(f"expected {table.k} entries for rank {self.n}, got {len(self.v)}")
        if any(x < 0 for x in self.v):
            raise InvalidExponentVector(f"negative entry in {self.v}")
        for a, b in table.incompatible_pairs:
            if self.v[a - 1] and self.v[b - 1]:
                raise InvalidExponentVector(
                    f"columns {a} and {b} are incompatible but both occur in {self.v}"
                )

    @property
    def boxes(self) -> int:
        table = enumerate_columns(self.n)
        return sum(x * len(c) for x, c in zip(self.v, table.columns))

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.v) + ")"


def parse_exponents(text: str, n: int) -> ExponentVector:
    s = text.strip()
    if not (s.startswith("(") and s.endswith(")")):
        raise ValueError(f"exponent vector must be parenthesised: {text!r}")
    try:
        v = tuple(int(x) for x in s[1:-1].split(",") if x.strip())
    except ValueError:
        raise ValueError(f"malformed exponent vector: {text!r}") from None
    return ExponentVector(n, v)


def exponents_of(t: Tableau, n: int) -> ExponentVector:
    table = enumerate_columns(n)
    v = [0] * table.k
    for col in t.columns:
        if col[0] > n:
            raise ValueError(f"tableau uses letter {col[0]} > rank {n}")
        v[table.index_of(col) - 1] += 1
    return ExponentVector(n, tuple(v))


def normal_form(w: Iterable[int], n: int) -> ExponentVector:
    return exponents_of(p_map(check_word(w, n)), n)


def from_exponents(ev: ExponentVector) -> Tableau:
    table = enumerate_columns(ev.n)
    cols = [c for c, mult in zip(table.columns, ev.v) for _ in range(mult)]
    return Tableau.from_columns(cols) if cols else EMPTY


# Rewriting system ------------------------------------------------------------

def rewrite_rule(a: Column, b: Column) -> tuple[Column, Column | None]:
    if compatible(a, b):
        raise ValueError(f"{a} and {b} are compatible; no rule applies")
    cols = p_map(a + b).columns
    assert 1 <= len(cols) <= 2
    return cols[0], (cols[1] if len(cols) == 2 else None)


def _reduce(symbols: list[Column], leftmost: bool) -> list[Column]:
    syms = list(symbols)
    while True:
        positions = range(len(syms) - 1)
        if not leftmost:
            positions = reversed(positions)
        for i in positions:
            if not compatible(syms[i], syms[i + 1]):
                g, d = rewrite_rule(syms[i], syms[i + 1])
                syms[i:i + 2] = [g] if d is None else [g, d]
                break
        else:
            return syms


def reduce_columns(symbols: Sequence[Column], leftmost: bool = True) -> list[Column]:
    """Rewrite a word over the column alphabet to its reduced form."""
    return _reduce(list(symbols), leftmost)


def normal_form_by_rewriting(w: Iterable[int], n: int, leftmost: bool = True) -> ExponentVector:
    """Independent route to ``normal_form`` that runs the column rewriting system."""
    w = check_word(w, n)
    reduced = _reduce([(x,) for x in w], leftmost)
    table = enumerate_columns(n)
    v = [0] * table.k
    for c in reduced:
        v[table.index_of(c) - 1] += 1
    return ExponentVector(n, tuple(v))


@lru_cache(maxsize=None)
def alpha_beta(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    table = enumerate_columns(n)
    alpha: list[int] = []
    beta: list[int] = []
    for j, col in enumerate(table.columns, start=1):
        alpha.extend(col)
        beta.extend([j] * len(col))
    return tuple(alpha), tuple(beta)
