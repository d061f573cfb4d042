"""Sentence decision with a choice of method.

Sentences that are existential (or whose negation is) go to the
satisfiability search; everything else goes through full quantifier
elimination.
"""
from __future__ import annotations

from . import formula as F
from .formula import DEFAULT_BUDGET, Formula
from .qe import NotASentence
from .qe import decide as decide_qe
from .sat import is_existential, satisfiable

METHODS = ("auto", "qe", "sat")


def decide(f: Formula, budget: int | None = DEFAULT_BUDGET, method: str = "auto") -> bool:
    """Truth of the sentence ``f`` over the integers."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if f.free_vars:
        raise NotASentence(f"free variables {sorted(f.free_vars)}")
    if method == "qe":
        return decide_qe(f, budget)
    memo: dict = {}
    if is_existential(f, memo):
        return satisfiable(f, budget=budget)
    neg = F.not_(f)
    if method == "sat" or is_existential(neg, memo):
        return not satisfiable(neg, budget=budget)
    return decide_qe(f, budget)
