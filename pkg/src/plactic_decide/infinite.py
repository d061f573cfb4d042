"""Equation systems over the infinite-rank plactic monoids P(N) and P(Z).

Any solution over the infinite alphabet projects to a solution over the
letters up to the largest constant (letters above it are erased, which is a
homomorphism), so a system over P(N) is decided in P_k for k the largest
letter occurring.  Over Z the support is first shifted into [1, k].
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .monoid_logic import EquationSystem, SolveResult, map_letters, parse_system, solve_system
from .presburger.formula import DEFAULT_BUDGET
from .tableaux import Tableau

Alphabet = Literal["natural", "integer"]
_ALIASES = {"nat": "natural", "natural": "natural", "int": "integer", "integer": "integer"}


def alphabet_name(tag: str) -> Alphabet:
    try:
        return _ALIASES[tag]  # type: ignore[return-value]
    except KeyError:
        raise ValueError(f"unknown alphabet {tag!r}; use nat or int") from None


@dataclass(frozen=True)
class InfEquationSystem:
    system: EquationSystem
    alphabet: Alphabet = "natural"

    def __post_init__(self):
        object.__setattr__(self, "alphabet", alphabet_name(self.alphabet))
        if self.alphabet == "natural" and any(x < 1 for x in self.system.letters()):
            raise ValueError("letters of a system over N must be >= 1")


@dataclass(frozen=True)
class SupportReduction:
    support: frozenset[int]
    rank: int
    relabel: dict[int, int]

    def __call__(self, letter: int) -> int:
        return self.relabel[letter]


def parse_inf_system(text: str, alphabet: str = "natural") -> InfEquationSystem:
    return InfEquationSystem(parse_system(text, signed=True), alphabet_name(alphabet))


def support(sys: InfEquationSystem) -> frozenset[int]:
    return frozenset(sys.system.letters())


def reduce(sys: InfEquationSystem) -> tuple[SupportReduction, EquationSystem]:
    """Target rank, letter map, and the rewritten finite-rank system.

    Natural letters are kept as they are (rank = largest letter, gaps kept);
    integer letters are shifted so the least one becomes 1.  A system without
    constants goes to rank 1.
    """
    supp = support(sys)
    if not supp:
        red = SupportReduction(supp, 1, {})
    elif sys.alphabet == "natural":
        red = SupportReduction(supp, max(supp), {z: z for z in sorted(supp)})
    else:
        lo = min(supp)
        red = SupportReduction(supp, max(supp) - lo + 1, {z: z - lo + 1 for z in sorted(supp)})
    eqs = tuple((map_letters(l, red), map_letters(r, red)) for l, r in sys.system.equations)
    return red, EquationSystem(eqs)


def decide_diophantine(sys: InfEquationSystem | str, alphabet: str = "natural",
                       budget: int = DEFAULT_BUDGET) -> bool:
    return solve_diophantine(sys, alphabet, budget=budget).satisfiable


def solve_diophantine(sys: InfEquationSystem | str, alphabet: str = "natural", witness: bool = False,
                      budget: int = DEFAULT_BUDGET, method: str = "auto") -> SolveResult:
    """Decide solvability over P(N) or P(Z); witnesses are over the reduced rank's letters."""
    if isinstance(sys, str):
        sys = parse_inf_system(sys, alphabet)
    red, finite = reduce(sys)
    return solve_system(finite, red.rank, witness=witness, budget=budget, method=method)


def project(t: Tableau, rank: int) -> Tableau:
    """Image under the homomorphism erasing every letter above ``rank``."""
    from .tableaux import p_map, row_reading

    return p_map([x for x in row_reading(t) if x <= rank])


def project_word(w, rank: int) -> tuple[int, ...]:
    return tuple(x for x in w if x <= rank)


def relabel_word(w, red: SupportReduction) -> tuple[int, ...]:
    return tuple(red(x) for x in w)


__all__ = [
    "InfEquationSystem",
    "SupportReduction",
    "alphabet_name",
    "decide_diophantine",
    "parse_inf_system",
    "project",
    "project_word",
    "reduce",
    "relabel_word",
    "solve_diophantine",
    "support",
]
