import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plactic_decide.interpretation import generate
from plactic_decide.monoid_logic import (
    SentenceSyntaxError,
    Translator,
    check_identity,
    decide_sentence,
    eval_term,
    format_formula,
    holds_in,
    parse_sentence,
    parse_system,
    parse_term,
    search_solutions,
    solve_system,
    translate,
    witness_tableaux,
)
from plactic_decide.presburger import formula as F
from plactic_decide.presburger.decide import decide
from plactic_decide.presburger.terms import LinearTerm
from plactic_decide.tableaux import LetterRangeError, all_tableaux, knuth_equal

CENTRE = ("forall x: forall y: ((x . 1 = 1 . x & x . 2 = 2 . x & y . 1 = 1 . y & y . 2 = 2 . y)"
          " -> x . y = y . x)")


def test_parse_and_format_round_trip():
    for text in ("forall x: eps . x = x", CENTRE, "exists x: x . [1] = [1] . x & !(x = eps)",
                 "exists x: (x = [2 1] or x = [1 2]) <-> true"):
        f = parse_sentence(text)
        assert parse_sentence(format_formula(f)) == f


@pytest.mark.parametrize("text", ["forall x eps = x", "x . = y", "exists x: x = [1", "(x = y"])
def test_syntax_errors(text):
    with pytest.raises(SentenceSyntaxError):
        parse_sentence(text)


def test_free_variables_rejected():
    with pytest.raises(SentenceSyntaxError):
        translate(parse_sentence("x = eps"), 2)


def test_letter_out_of_rank():
    with pytest.raises(LetterRangeError):
        decide_sentence("exists x: x = [3]", 2)


def test_rank_zero_rejected():
    with pytest.raises(ValueError):
        decide_sentence("forall x: x = x", 0)


def test_translate_examples():
    assert decide(translate(parse_sentence("forall x: eps . x = x"), 2))
    assert not decide(translate(parse_sentence("2 . 1 = 1 . 2"), 2))
    assert not decide(translate(parse_sentence("forall x: forall y: x . y = y . x"), 2))


def _is_translator_block(names):
    return all(re.fullmatch(r"[vp]\d+\w*_\d+", v) for v in names)


@pytest.mark.parametrize("n", [2, 3])
def test_translation_quantifiers_are_guarded(n):
    f = translate(parse_sentence(CENTRE if n == 2 else "exists x: forall y: x . y . [3] = [1] . y"), n)
    seen, stack, checked = set(), [f], 0
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        stack.extend(g.args)
        if g.kind in ("exists", "forall") and _is_translator_block(g.bound_vars):
            atoms = {id(a) for a in F.atoms(g.args[0])}
            for v in g.bound_vars:
                assert id(F.le(0, LinearTerm.var(v))) in atoms, v
            checked += 1
    assert checked >= 2


@pytest.mark.parametrize(
    "text, want",
    [
        ("forall x: eps . x = x", True),
        ("forall x: x . eps = x", True),
        ("forall x: forall y: x . y = y . x", False),
        ("exists x: x . 1 = 1 . x & !(x = eps)", True),
        (CENTRE, True),
        ("exists x: x . x = [2 1]", False),
        ("exists x: x . [1] = [2 1]", True),
        ("forall x: exists y: x . y = y . x", True),
        ("exists x: forall y: x . y = y", True),
    ],
)
def test_decide_sentence_rank2(text, want):
    assert decide_sentence(text, 2) is want


@pytest.mark.parametrize(
    "text",
    [
        "exists x: x . 1 = 1 . x & !(x = eps)",
        "exists x: x . [1] = [2 1]",
        "exists x: exists y: x . y = [2 1 2] & !(x = eps) & !(y = eps)",
        "forall x: forall y: x . y = y . x",
        "forall x: x . x = x",
        "forall x: x . [2] = [2] . x",
    ],
)
def test_bounded_search_agreement(text):
    f = parse_sentence(text)
    domain = all_tableaux(2, 6)
    found = holds_in(f, {}, 2, domain)
    verdict = decide_sentence(f, 2)
    if f.kind == "exists" and found:
        assert verdict
    if f.kind == "forall" and not found:
        assert not verdict


def test_content_hints_do_not_change_verdicts():
    interp = generate(2)
    for text in ("forall x: forall y: x . y = y . x", "exists x: x . [1] = [2 1]", "exists x: x . x = [2 1]"):
        f = parse_sentence(text)
        plain = Translator(interp, content_hints=False).formula(f, {})
        assert decide(plain) == decide(translate(f, interp))


def test_identity_examples():
    assert check_identity(parse_term("[1] . [3] . [2]"), parse_term("[3] . [1] . [2]"), 3)
    assert not check_identity("x . y", "y . x", 2)
    assert not check_identity("x . x", "x", 2)
    assert not check_identity("x . y . x", "x . x . y", 2)
    assert check_identity("x . eps", "x", 3)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(1, 3), max_size=5), st.lists(st.integers(1, 3), max_size=5))
def test_ground_atoms_match_word_problem(u, v):
    def word(w):
        return "[" + " ".join(map(str, w)) + "]" if w else "eps"

    assert decide_sentence(f"{word(u)} = {word(v)}", 3) == knuth_equal(u, v)


def _check_witness(text, n):
    sys = parse_system(text)
    res = solve_system(sys, n, witness=True)
    if res.satisfiable:
        tabs = witness_tableaux(res)
        for lhs, rhs in sys.equations:
            assert eval_term(lhs, tabs, n) == eval_term(rhs, tabs, n)
    return res


def test_solve_examples():
    res = _check_witness("X . [1] = [1] . X", 2)
    assert res.satisfiable and all(not any(v.v) for v in res.witness.values())
    assert not solve_system("[1] . X = [2]", 2).satisfiable
    assert _check_witness("X . Y = [2 1]\nY . X = [2 1]", 2).satisfiable
    assert _check_witness("X . [2 1] = [2] . X . [1]", 3).satisfiable


@pytest.mark.parametrize(
    "text",
    ["X . [2] = [1 2]", "X . X = [1 1 2 2]", "X . Y = Y . X . [1]", "[2] . X = X . [1]",
     "X . [1 2] = [1] . Y\nY . [1] = X . [1 1]", "X . X . X = [2 1 2 1 1 2]"],
)
def test_solve_agrees_with_bounded_search(text):
    sys = parse_system(text)
    res = _check_witness(text, 2)
    hit = next(search_solutions(sys, 2, all_tableaux(2, 4)), None)
    if hit is not None:
        assert res.satisfiable
