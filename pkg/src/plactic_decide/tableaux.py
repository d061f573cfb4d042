"""Semistandard Young tableaux and Schensted insertion (French convention).

A tableau is stored row-major, rows indexed top to bottom, so the last row
is the longest one.  Words are plain tuples of positive ints.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Sequence

Word = tuple[int, ...]


class LetterRangeError(ValueError):
    """A letter falls outside the alphabet [n] of the monoid in use."""


class InvalidTableauError(ValueError):
    pass


def check_word(w: Iterable[int], n: int | None = None) -> Word:
    w = tuple(w)
    for x in w:
        if not isinstance(x, int) or x < 1 or (n is not None and x > n):
            raise LetterRangeError(f"letter {x!r} outside [1, {n}]" if n else f"letter {x!r} is not >= 1")
    return w


@dataclass(frozen=True)
class Tableau:
    rows: tuple[Word, ...] = ()

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for r in rows:
            if not r:
                raise InvalidTableauError("empty row")
            check_word(r)
            if any(r[i] > r[i + 1] for i in range(len(r) - 1)):
                raise InvalidTableauError(f"row {r} is not weakly increasing")
        for upper, lower in zip(rows, rows[1:]):
            if len(upper) > len(lower):
                raise InvalidTableauError("rows must get longer towards the bottom")
            if any(upper[j] <= lower[j] for j in range(len(upper))):
                raise InvalidTableauError("columns must strictly decrease top to bottom")

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "Tableau":
        """Build from columns given left to right, each read top to bottom."""
        if not columns:
            return cls()
        height = len(columns[0])
        rows = []
        for depth in range(height):  # depth 0 is the bottom row
            rows.append(tuple(c[len(c) - 1 - depth] for c in columns if len(c) > depth))
        return cls(tuple(reversed(rows)))

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    @property
    def columns(self) -> tuple[Word, ...]:
        """Columns left to right, each as its strictly decreasing word."""
        if not self.rows:
            return ()
        bottom = self.rows[-1]
        cols = []
        for j in range(len(bottom)):
            cols.append(tuple(r[j] for r in self.rows if len(r) > j))
        return tuple(cols)

    def letters(self) -> list[int]:
        return sorted(x for r in self.rows for x in r)

    def max_letter(self) -> int:
        return max((r[-1] for r in self.rows), default=0)

    def __str__(self) -> str:
        return format_tableau(self)


EMPTY = Tableau()


def row_reading(t: Tableau) -> Word:
    return tuple(x for r in t.rows for x in r)


def column_reading(t: Tableau) -> Word:
    return tuple(x for c in t.columns for x in c)


def _insert_rows(rows: list[list[int]], x: int) -> None:
    # rows are bottom-first here so bumping walks upwards
    for row in rows:
        j = bisect_right(row, x)
        if j == len(row):
            row.append(x)
            return
        row[j], x = x, row[j]
    rows.append([x])


def schensted_insert(t: Tableau, x: int, n: int | None = None) -> Tableau:
    check_word((x,), n)
    rows = [list(r) for r in reversed(t.rows)]
    _insert_rows(rows, x)
    return Tableau(tuple(tuple(r) for r in reversed(rows)))


def p_map(w: Iterable[int], n: int | None = None) -> Tableau:
    """Schensted's P-symbol of ``w``."""
    w = check_word(w, n)
    rows: list[list[int]] = []
    for x in w:
        _insert_rows(rows, x)
    return Tableau(tuple(tuple(r) for r in reversed(rows)))


def multiply(u: Tableau, v: Tableau, n: int | None = None) -> Tableau:
    if n is not None:
        for t in (u, v):
            if t.max_letter() > n:
                raise LetterRangeError(f"tableau uses letter {t.max_letter()} > rank {n}")
    return p_map(row_reading(u) + row_reading(v))


def knuth_equal(u: Iterable[int], v: Iterable[int], n: int | None = None) -> bool:
    return p_map(u, n) == p_map(v, n)


def top(t: Tableau) -> Tableau:
    return Tableau(t.rows[:-1])


def bottom(t: Tableau) -> Word:
    return t.rows[-1] if t.rows else ()


def stitch(u: Tableau, r: Sequence[int]) -> Tableau:
    """Put the row ``r`` underneath the top tableau ``u``.

    Returns the empty tableau when the result is not a tableau, mirroring the
    convention that the stitch of an incompatible pair is the identity.
    """
    r = check_word(r)
    if any(x == 1 for row in u.rows for x in row):
        raise ValueError("stitch expects a top tableau (no letter 1)")
    if any(r[i] > r[i + 1] for i in range(len(r) - 1)):
        raise ValueError(f"{r} is not a row")
    if not r:
        return u if not u.rows else EMPTY
    try:
        return Tableau(u.rows + (r,))
    except InvalidTableauError:
        return EMPTY


def knuth_relations(n: int) -> list[tuple[Word, Word]]:
    """All instances of the two Knuth relation families over [n]."""
    rels = []
    for x in range(1, n + 1):
        for y in range(x, n + 1):
            for z in range(y + 1, n + 1):
                rels.append(((x, z, y), (z, x, y)))  # x <= y < z
    for x in range(1, n + 1):
        for y in range(x + 1, n + 1):
            for z in range(y, n + 1):
                rels.append(((y, x, z), (y, z, x)))  # x < y <= z
    return rels


# Text formats ---------------------------------------------------------------

def format_word(w: Sequence[int]) -> str:
    return "[" + " ".join(str(x) for x in w) + "]"


def parse_word(text: str, signed: bool = False) -> Word:
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ValueError(f"word must be bracketed: {text!r}")
    body = s[1:-1].split()
    try:
        letters = tuple(int(tok) for tok in body)
    except ValueError:
        raise ValueError(f"malformed word: {text!r}") from None
    return letters if signed else check_word(letters)


def format_tableau(t: Tableau) -> str:
    """Rows bottom to top, one per line."""
    return "\n".join(" ".join(str(x) for x in r) for r in reversed(t.rows))


def parse_tableau(text: str) -> Tableau:
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip()]
    return Tableau(tuple(tuple(int(x) for x in ln) for ln in reversed(lines)))


def all_tableaux(n: int, max_boxes: int) -> list[Tableau]:
    """Every tableau over [n] with at most ``max_boxes`` boxes, via distinct P-symbols."""
    seen: set[Tableau] = {EMPTY}
    frontier = [EMPTY]
    for _ in range(max_boxes):
        nxt = []
        for t in frontier:
            for x in range(1, n + 1):
                s = schensted_insert(t, x)
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return sorted(seen, key=lambda t: (t.size, row_reading(t)))
