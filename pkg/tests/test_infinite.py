import itertools

import pytest

from plactic_decide.infinite import (
    InfEquationSystem,
    alphabet_name,
    decide_diophantine,
    parse_inf_system,
    project,
    project_word,
    reduce,
    relabel_word,
    solve_diophantine,
    support,
)
from plactic_decide.monoid_logic import eval_term, parse_system, search_solutions
from plactic_decide.tableaux import all_tableaux, knuth_relations, multiply, p_map


def test_support_examples():
    assert support(parse_inf_system("X . [1] = [5] . Y . [2]")) == {1, 2, 5}
    assert support(parse_inf_system("X . Y = Y . X")) == frozenset()
    assert support(parse_inf_system("[-1] . X = [3]", "int")) == {-1, 3}


def test_reduce_examples():
    red, sys = reduce(parse_inf_system("X . [1] = [5] . Y . [2]"))
    assert red.rank == 5 and red.relabel == {1: 1, 2: 2, 5: 5}
    red, sys = reduce(parse_inf_system("[-1] . X = [3]", "int"))
    assert red.rank == 5 and red.relabel == {-1: 1, 3: 5}
    assert sys.letters() == {1, 5}
    red, _ = reduce(parse_inf_system("X . Y = Y . X"))
    assert red.rank == 1


def test_alphabet_validation():
    assert alphabet_name("nat") == "natural" and alphabet_name("int") == "integer"
    with pytest.raises(ValueError):
        alphabet_name("rat")
    with pytest.raises(ValueError):
        parse_inf_system("X = [0]", "nat")


def test_decide_examples():
    assert decide_diophantine("X . [1] = [1] . X")
    assert not decide_diophantine("[1] . X = [2]")
    sys = parse_inf_system("X . [3] = [3] . X", "int")
    assert reduce(sys)[0].rank == 1
    assert decide_diophantine(sys)


def test_integer_relabel_end_to_end():
    assert not decide_diophantine("[-1] . X = [3]", "int")


def test_witness_over_reduced_rank():
    res = solve_diophantine("X . [2] = [1 2]", witness=True)
    assert res.satisfiable
    assert {v: str(ev) for v, ev in res.witness.items()} == {"X": "(0,1,0)"}


def test_projection_is_a_homomorphism():
    words = [w for k in range(4) for w in itertools.product((1, 3, 4, 6), repeat=k)]
    for rank in (2, 3, 4):
        for lhs, rhs in knuth_relations(6):
            assert p_map(project_word(lhs, rank)) == p_map(project_word(rhs, rank))
        for u, v in itertools.product(words[::3], repeat=2):
            assert project(p_map(u + v), rank) == multiply(project(p_map(u), rank), project(p_map(v), rank))


def test_relabel_preserves_knuth_relations():
    for size in (1, 2, 3):
        for supp in itertools.combinations(range(-3, 4), size):
            text = "X = [" + " ".join(map(str, supp)) + "]"
            red, _ = reduce(InfEquationSystem(parse_system(text, signed=True), "integer"))
            assert len(set(red.relabel.values())) == size
            valid = set(knuth_relations(red.rank))
            for x, y, z in itertools.product(supp, repeat=3):
                cases = []
                if x <= y < z:
                    cases.append(((x, z, y), (z, x, y)))
                if x < y <= z:
                    cases.append(((y, x, z), (y, z, x)))
                for lhs, rhs in cases:
                    assert (relabel_word(lhs, red), relabel_word(rhs, red)) in valid


def test_solution_transfer():
    # solutions found by bounded search over the support alphabet are reported as satisfiable
    for text in ("X . [2] = [1 2]", "X . [1] = [1] . X", "[2] . X = X . [2]", "X . Y = [2 1]"):
        sys = parse_inf_system(text)
        red, finite = reduce(sys)
        hit = next(search_solutions(finite, red.rank, all_tableaux(red.rank, 5)), None)
        assert hit is not None
        assert decide_diophantine(sys)
        for lhs, rhs in finite.equations:
            assert eval_term(lhs, hit, red.rank) == eval_term(rhs, hit, red.rank)


@pytest.mark.parametrize("text", ["X . [1] = [1] . X", "[1] . X = [2]", "X . [2] = [1 2]", "X . Y = [2 1]"])
def test_natural_and_integer_agree(text):
    assert decide_diophantine(text, "nat") == decide_diophantine(text, "int")
