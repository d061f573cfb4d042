"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed live) or
directly with ``python3 tests/test_acceptance.py``.  Criterion 8 is a stretch
goal and never fails the suite; its wall-clock cap is read from
``PLACTIC_STRETCH_SECONDS`` (default 60).
"""
import itertools
import os
import random
import signal
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from corpus import bounded_sentence, brute_force  # noqa: E402
from plactic_decide.columns import (  # noqa: E402
    alpha_beta,
    enumerate_columns,
    exponents_of,
    normal_form,
    normal_form_by_rewriting,
    reduce_columns,
)
from plactic_decide.infinite import decide_diophantine, parse_inf_system, reduce  # noqa: E402
from plactic_decide.interpretation import (  # noqa: E402
    build_bottom,
    build_eta,
    build_rho,
    build_stitch,
    build_top,
    generate,
    var_names,
)
from plactic_decide.monoid_logic import (  # noqa: E402
    check_identity,
    decide_sentence,
    eval_term,
    holds_in,
    parse_sentence,
    parse_term,
)
from plactic_decide.presburger.decide import decide  # noqa: E402
from plactic_decide.presburger.evaluate import evaluate, holds  # noqa: E402
from plactic_decide.presburger.formula import BudgetExceeded  # noqa: E402
from plactic_decide.presburger.parse import parse_formula  # noqa: E402
from plactic_decide.tableaux import (  # noqa: E402
    EMPTY,
    Tableau,
    all_tableaux,
    bottom,
    column_reading,
    multiply,
    p_map,
    row_reading,
    stitch,
    top,
)

LIMITS = {1: 1, 2: 60, 3: 600, 4: 300, 5: 120, 6: 600, 7: 300}
CENTRE = ("forall x: forall y: ((x . 1 = 1 . x & x . 2 = 2 . x & y . 1 = 1 . y & y . 2 = 2 . y)"
          " -> x . y = y . x)")
ADJAN = ("x . y . y . x . x . y . x . y . y . x", "x . y . y . x . y . x . x . y . y . x")
NEAR_ADJAN = ("x . y . y . x . x . y . x . y . y . x", "x . y . y . x . y . x . x . y . x . y")


def ev(t, n):
    return exponents_of(t, n).v


def env_of(n, **vecs):
    k = 2 ** n - 1
    out = {}
    for prefix, v in vecs.items():
        if prefix == "m":
            out["m"] = v
        else:
            out.update(zip(var_names(prefix, k), v))
    return out


def row_vec(t, n):
    return ev(Tableau((bottom(t),)) if t.rows else EMPTY, n)


# criteria -------------------------------------------------------------------------

def criterion_1():
    t = Tableau(((3,), (2, 3), (1, 1, 2, 2, 2)))
    big = Tableau(((3, 4), (2, 3, 3), (1, 1, 2, 4, 4)))
    u = Tableau(((4,), (3, 3), (2, 2, 2, 3, 4)))
    checks = {
        "p_map row reading": p_map((3, 2, 3, 1, 1, 2, 2, 2)) == t,
        "p_map column reading": p_map((3, 2, 1, 3, 1, 2, 2, 2)) == t,
        "readings": row_reading(t) == (3, 2, 3, 1, 1, 2, 2, 2) and column_reading(t) == (3, 2, 1, 3, 1, 2, 2, 2),
        "top/bottom": row_reading(top(big)) == (3, 4, 2, 3, 3) and bottom(big) == (1, 1, 2, 4, 4),
        "stitch": row_reading(u) == (4, 3, 3, 2, 2, 2, 3, 4)
        and row_reading(stitch(u, (1, 1, 1, 1, 3))) == (4, 3, 3, 2, 2, 2, 3, 4, 1, 1, 1, 1, 3),
        "columns": enumerate_columns(3).columns == ((3, 2, 1), (2, 1), (3, 1), (3, 2), (1,), (2,), (3,)),
        "alpha/beta": alpha_beta(3) == ((3, 2, 1, 2, 1, 3, 1, 3, 2, 1, 2, 3), (1, 1, 1, 2, 2, 3, 3, 4, 4, 5, 6, 7)),
        "I": generate(3).I == {(4, 5)},
    }
    bad = [k for k, ok in checks.items() if not ok]
    return not bad, f"{len(checks) - len(bad)}/{len(checks)} worked examples" + (f"; failed {bad}" if bad else "")


def criterion_2():
    triples = words = 0
    for n in (1, 2, 3):
        cols = enumerate_columns(n).columns
        for trip in itertools.product(cols, repeat=3):
            triples += 1
            left, right = reduce_columns(trip, True), reduce_columns(trip, False)
            if left != right:
                return False, f"rank {n}: overlap {trip} reduces to {left} and {right}"
        for length in range(6):
            for w in itertools.product(range(1, n + 1), repeat=length):
                words += 1
                nf = ev(p_map(w), n)
                if normal_form_by_rewriting(w, n).v != nf or normal_form(w, n).v != nf:
                    return False, f"rank {n}: word {w} disagrees"
    return True, f"{triples} column triples confluent, {words} words agree with insertion"


def criterion_3():
    rng = random.Random(3)
    eta2 = build_eta(2)
    ts2 = all_tableaux(2, 5)
    pairs = 0
    for a, b in itertools.product(ts2, repeat=2):
        c = ev(multiply(a, b, 2), 2)
        base = env_of(2, a=ev(a, 2), b=ev(b, 2))
        if not holds(eta2, {**base, **env_of(2, c=c)}):
            return False, f"eta_2 rejects {a} * {b}"
        for w in _perturb(c, rng, 5):
            if holds(eta2, {**base, **env_of(2, c=w)}):
                return False, f"eta_2 accepts a wrong product for {a} * {b}"
        pairs += 1
    eta3 = build_eta(3)
    ts3 = all_tableaux(3, 8)
    for _ in range(500):
        a = rng.choice(ts3)
        b = rng.choice([s for s in ts3 if s.size <= 8 - a.size])
        c = ev(multiply(a, b, 3), 3)
        base = env_of(3, a=ev(a, 3), b=ev(b, 3))
        if not evaluate(eta3, {**base, **env_of(3, c=c)}, bound=8):
            return False, f"eta_3 rejects {a} * {b}"
        for w in _perturb(c, rng, 5):
            if evaluate(eta3, {**base, **env_of(3, c=w)}, bound=8):
                return False, f"eta_3 accepts a wrong product for {a} * {b}"
    return True, f"eta_2 exhaustive on {pairs} pairs, eta_3 on 500 random pairs, 5 perturbations each"


def _perturb(v, rng, count):
    seen = set()
    while len(seen) < count:
        w = list(v)
        w[rng.randrange(len(w))] += rng.choice([-1, 1, 2])
        if tuple(w) != tuple(v):
            seen.add(tuple(w))
    return sorted(seen)


def criterion_4():
    checked = 0
    for n in (2, 3):
        ts = all_tableaux(n, 6)
        rows = [t for t in ts if len(t.rows) <= 1]
        tops = [t for t in ts if all(x > 1 for r in t.rows for x in r)]
        fb, ft, fs = build_bottom(n), build_top(n), build_stitch(n)
        for t in ts:
            e = env_of(n, a=ev(t, n))
            want_b, want_t = row_vec(t, n), ev(top(t), n)
            for r in rows:
                checked += 1
                if holds(fb, {**e, **env_of(n, b=ev(r, n))}) != (ev(r, n) == want_b):
                    return False, f"bottom graph disagrees at {t}, {r}"
            for s in ts:
                checked += 1
                if holds(ft, {**e, **env_of(n, b=ev(s, n))}) != (ev(s, n) == want_t):
                    return False, f"top graph disagrees at {t}, {s}"
        for x in range(1, n + 1):
            f_top, f_bottom = build_rho(n, x)
            for r in rows:
                for m in range(7 - r.size):
                    out = p_map((r.rows[0] if r.rows else ()) + (x,) * m)
                    want_top, want_row = ev(top(out), n), row_vec(out, n)
                    e = env_of(n, a=ev(r, n), m=m)
                    for s in rows:
                        checked += 2
                        v = ev(s, n)
                        if holds(f_top, {**e, **env_of(n, b=v)}) != (v == want_top):
                            return False, f"rho top graph disagrees at {r}, {x}^{m}"
                        if holds(f_bottom, {**e, **env_of(n, b=v)}) != (v == want_row):
                            return False, f"rho bottom graph disagrees at {r}, {x}^{m}"
        for u in tops:
            for r in rows:
                if u.size + r.size > 6:
                    continue
                out = stitch(u, r.rows[0] if r.rows else ())
                ok = out != EMPTY or (u == EMPTY and not r.rows)
                e = env_of(n, a=ev(u, n), b=ev(r, n))
                for s in ts:
                    checked += 1
                    if holds(fs, {**e, **env_of(n, c=ev(s, n))}) != (ok and s == out):
                        return False, f"stitch graph disagrees at {u}, {r}, {s}"
    return True, f"{checked} input/output pairs checked exhaustively at n in {{2,3}}"


def criterion_5():
    fixed = {
        "forall x. exists y. (x = y+y) or (x = y+y+1)": True,
        "exists a. exists b. a >= 0 & b >= 0 & 3*a + 5*b = 7": False,
        "forall x. x >= 8 -> exists a. exists b. a >= 0 & b >= 0 & x = 3*a + 5*b": True,
    }
    for text, want in fixed.items():
        if decide(parse_formula(text)) != want:
            return False, f"fixed suite: {text}"
    for seed in range(200):
        f, prefix, body = bounded_sentence(seed)
        if decide(f) != brute_force(prefix, body):
            return False, f"generated sentence {seed} disagrees with brute force"
    return True, "fixed suite and 200 generated sentences agree with brute force"


def criterion_6():
    domain = all_tableaux(2, 6)
    cases = [
        ("forall x: eps . x = x", True),
        ("forall x: forall y: x . y = y . x", False),
        ("exists x: x . 1 = 1 . x & !(x = eps)", True),
        (CENTRE, True),
    ]
    notes = []
    for text, want in cases:
        t0 = time.time()
        try:
            got = decide_sentence(text, 2)
        except BudgetExceeded:
            return False, f"budget exhausted on {text}"
        if got != want:
            return False, f"{text} decided {got}"
        f = parse_sentence(text)
        bounded = holds_in(f, {}, 2, domain)
        # universal TRUE: no counterexample; universal FALSE: counterexample found; existential TRUE: witness found
        if bounded != want:
            return False, f"bounded oracle disagrees on {text}"
        notes.append(f"{time.time() - t0:.2f}s")
    return True, "4 verdicts confirmed by bounded search (" + ", ".join(notes) + ")"


def criterion_7():
    got = {
        "X.[1]=[1].X over N": decide_diophantine("X . [1] = [1] . X", "nat"),
        "[1].X=[2] over N": decide_diophantine("[1] . X = [2]", "nat"),
        "X.[3]=[3].X over Z": decide_diophantine("X . [3] = [3] . X", "int"),
        "[-1].X=[3] over Z": decide_diophantine("[-1] . X = [3]", "int"),
    }
    want = {"X.[1]=[1].X over N": True, "[1].X=[2] over N": False, "X.[3]=[3].X over Z": True,
            "[-1].X=[3] over Z": False}
    red, _ = reduce(parse_inf_system("[-1] . X = [3]", "int"))
    red3, _ = reduce(parse_inf_system("X . [3] = [3] . X", "int"))
    if red.rank != 5 or red.relabel != {-1: 1, 3: 5} or red3.rank != 1:
        return False, "reduction parameters differ"
    bad = [k for k in want if got[k] != want[k]]
    return not bad, "all four verdicts as stated, relabel {-1,3} -> rank 5" if not bad else f"wrong: {bad}"


class _Timeout(Exception):
    pass


def criterion_8(seconds=None):
    seconds = int(seconds or os.environ.get("PLACTIC_STRETCH_SECONDS", "60"))
    domain = all_tableaux(2, 8)
    parts = []
    for name, (u, v) in (("near-Adjan", NEAR_ADJAN), ("Adjan", ADJAN)):
        lhs, rhs = parse_term(u), parse_term(v)
        cex = next(((x, y) for x in domain for y in domain
                    if eval_term(lhs, {"x": x, "y": y}, 2) != eval_term(rhs, {"x": x, "y": y}, 2)), None)
        t0 = time.time()
        verdict = None

        def alarm(*_):
            raise _Timeout

        old = signal.signal(signal.SIGALRM, alarm)
        signal.alarm(seconds)
        try:
            verdict = check_identity(lhs, rhs, 2, budget=10 ** 9)
        except (_Timeout, BudgetExceeded):
            pass
        finally:
            signal.alarm(0)
            signal.signal(signal.SIGALRM, old)
        cost = time.time() - t0
        if verdict is not None and cex is not None and verdict:
            return False, f"{name}: TRUE contradicts a counterexample"
        bounded = "counterexample found" if cex else "no counterexample up to 8 boxes"
        shown = "no verdict" if verdict is None else ("TRUE" if verdict else "FALSE")
        parts.append(f"{name}: {shown} in {cost:.1f}s ({bounded})")
    decided = all("no verdict" not in p for p in parts)
    return decided, "; ".join(parts)


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 9)}


def _report(i, ok, detail, elapsed):
    limit = LIMITS.get(i)
    slow = limit is not None and elapsed > limit
    status = "PASS" if ok and not slow else ("REPORT" if i == 8 else "FAIL")
    extra = f" over the {limit}s limit" if slow else ""
    return f"criterion {i}: {status} [{elapsed:.1f}s{extra}] {detail}", ok and not slow


@pytest.mark.parametrize("i", range(1, 9))
def test_criterion(i, capsys):
    t0 = time.time()
    ok, detail = CRITERIA[i]()
    line, passed = _report(i, ok, detail, time.time() - t0)
    with capsys.disabled():
        print("\n" + line)
    if i != 8:
        assert passed, line


if __name__ == "__main__":
    for i, fn in CRITERIA.items():
        t0 = time.time()
        ok, detail = fn()
        print(_report(i, ok, detail, time.time() - t0)[0], flush=True)
