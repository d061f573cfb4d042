import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plactic_decide.tableaux import (
    EMPTY,
    InvalidTableauError,
    LetterRangeError,
    Tableau,
    all_tableaux,
    bottom,
    column_reading,
    format_tableau,
    knuth_equal,
    knuth_relations,
    multiply,
    p_map,
    parse_tableau,
    parse_word,
    row_reading,
    schensted_insert,
    stitch,
    top,
)

EXAMPLE = Tableau(((3,), (2, 3), (1, 1, 2, 2, 2)))
BIG = Tableau(((3, 4), (2, 3, 3), (1, 1, 2, 4, 4)))


def words(n, max_len):
    return st.lists(st.integers(1, n), max_size=max_len).map(tuple)


def test_insert_examples():
    assert schensted_insert(EMPTY, 1) == Tableau(((1,),))
    assert schensted_insert(Tableau(((1, 1, 3),)), 2) == Tableau(((3,), (1, 1, 2)))
    assert schensted_insert(BIG, 4) == Tableau(((3, 4), (2, 3, 3), (1, 1, 2, 4, 4, 4)))


def test_p_map_examples():
    assert p_map(()) == EMPTY
    assert p_map((3, 2, 3, 1, 1, 2, 2, 2)) == EXAMPLE
    assert p_map((3, 2, 1, 3, 1, 2, 2, 2)) == EXAMPLE


def test_readings():
    assert row_reading(EXAMPLE) == (3, 2, 3, 1, 1, 2, 2, 2)
    assert column_reading(EXAMPLE) == (3, 2, 1, 3, 1, 2, 2, 2)
    assert row_reading(BIG) == (3, 4, 2, 3, 3, 1, 1, 2, 4, 4)
    assert row_reading(EMPTY) == () == column_reading(EMPTY)


def test_multiply_examples():
    assert multiply(EMPTY, EXAMPLE) == EXAMPLE
    assert multiply(p_map((2,)), p_map((1,)), 2) == Tableau(((2,), (1,)))


def test_knuth_equal_examples():
    assert knuth_equal((1, 3, 2), (3, 1, 2))
    assert knuth_equal((2, 1, 3), (2, 3, 1))
    assert not knuth_equal((1, 2), (2, 1))


def test_top_bottom():
    assert top(BIG) == Tableau(((3, 4), (2, 3, 3)))
    assert bottom(BIG) == (1, 1, 2, 4, 4)
    assert top(Tableau(((1, 2),))) == EMPTY
    assert (top(Tableau(((2,), (1,)))), bottom(Tableau(((2,), (1,))))) == (Tableau(((2,),)), (1,))
    assert top(EMPTY) == EMPTY and bottom(EMPTY) == ()


def test_stitch_examples():
    u = Tableau(((4,), (3, 3), (2, 2, 2, 3, 4)))
    assert row_reading(u) == (4, 3, 3, 2, 2, 2, 3, 4)
    t = stitch(u, (1, 1, 1, 1, 3))
    assert t == Tableau(((4,), (3, 3), (2, 2, 2, 3, 4), (1, 1, 1, 1, 3)))
    assert stitch(EMPTY, (1, 2, 2)) == Tableau(((1, 2, 2),))
    assert stitch(Tableau(((2,),)), (2,)) == EMPTY


def test_stitch_errors():
    with pytest.raises(ValueError):
        stitch(Tableau(((1,),)), (2,))
    with pytest.raises(ValueError):
        stitch(EMPTY, (2, 1))


def test_invalid_tableaux():
    for rows in (((2, 1),), ((1,), (1,)), ((1, 2), (3,)), ((),)):
        with pytest.raises(InvalidTableauError):
            Tableau(rows)


def test_letter_range():
    with pytest.raises(LetterRangeError):
        p_map((1, 4), 3)
    with pytest.raises(LetterRangeError):
        schensted_insert(EMPTY, 0)


def test_text_round_trip():
    assert parse_tableau(format_tableau(BIG)) == BIG
    assert parse_word("[1 3 2]") == (1, 3, 2)
    assert parse_word("[-1 3]", signed=True) == (-1, 3)
    with pytest.raises(ValueError):
        parse_word("1 2")


@given(words(4, 8))
def test_p_map_is_a_tableau_with_same_content(w):
    t = p_map(w)
    assert sorted(row_reading(t)) == sorted(w)
    assert p_map(row_reading(t)) == t
    assert p_map(column_reading(t)) == t


@given(words(3, 6), words(3, 6))
def test_multiply_matches_concatenation(u, v):
    a, b = p_map(u), p_map(v)
    ab = multiply(a, b)
    assert ab == p_map(u + v)
    assert ab.size == a.size + b.size


@settings(max_examples=50)
@given(words(3, 4), words(3, 4), words(3, 4))
def test_associativity(u, v, w):
    a, b, c = p_map(u), p_map(v), p_map(w)
    assert multiply(multiply(a, b), c) == multiply(a, multiply(b, c))


def test_knuth_relations_hold():
    for n in range(1, 5):
        for lhs, rhs in knuth_relations(n):
            assert knuth_equal(lhs, rhs)


def test_knuth_classes_are_unions_of_relation_moves():
    # connected components of Knuth moves on words of length 4 over [3] are exactly P-classes
    rels = knuth_relations(3)
    ws = list(itertools.product(range(1, 4), repeat=4))
    parent = {w: w for w in ws}

    def find(w):
        while parent[w] != w:
            parent[w] = parent[parent[w]]
            w = parent[w]
        return w

    for w in ws:
        for i in range(2):
            for lhs, rhs in rels:
                for a, b in ((lhs, rhs), (rhs, lhs)):
                    if w[i:i + 3] == a:
                        parent[find(w)] = find(w[:i] + b + w[i + 3:])
    for u, v in itertools.combinations(ws, 2):
        assert (find(u) == find(v)) == (p_map(u) == p_map(v))


def test_all_tableaux_counts():
    ts = all_tableaux(2, 3)
    assert len(ts) == len(set(ts))
    assert len(ts) == len({p_map(w) for k in range(4) for w in itertools.product((1, 2), repeat=k)})
