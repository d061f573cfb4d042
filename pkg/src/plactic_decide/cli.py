"""Command-line interface.

Exit status: 0 on success, 2 on malformed input, 3 when the formula node
budget runs out, 64 for an unknown subcommand.  The first stdout line is a
single result token (``TRUE``/``FALSE``, a word, or an exponent vector).
"""
from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .columns import InvalidExponentVector, exponents_of, from_exponents, parse_exponents
from .infinite import alphabet_name, parse_inf_system, reduce, solve_diophantine
from .interpretation import (
    build_bottom,
    build_domain,
    build_equality,
    build_eta,
    build_eta_chain,
    build_mu,
    build_rho,
    build_stitch,
    build_top,
)
from .monoid_logic import (
    SentenceSyntaxError,
    check_identity,
    decide_sentence,
    parse_equation,
    parse_sentence,
    parse_system,
    parse_term,
    solve_system,
)
from .presburger.formula import DEFAULT_BUDGET, BudgetExceeded, to_text
from .presburger.parse import ParseError, parse_formula
from .presburger.decide import METHODS, decide
from .presburger.qe import NotASentence
from .tableaux import (
    InvalidTableauError,
    LetterRangeError,
    Tableau,
    format_tableau,
    format_word,
    knuth_equal,
    multiply,
    p_map,
    parse_word,
    row_reading,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_BUDGET = 3
EXIT_USAGE = 64

COMMANDS = ("mult", "nf", "eq", "decide", "identity", "solve", "solve-inf", "interp-dump", "pres-decide")
_TWO_WORD = {("interp", "dump"): "interp-dump", ("pres", "decide"): "pres-decide"}
_INPUT_ERRORS = (ParseError, SentenceSyntaxError, LetterRangeError, InvalidTableauError,
                 InvalidExponentVector, NotASentence, ValueError)


def _verdict(b: bool) -> str:
    return "TRUE" if b else "FALSE"


def _payload(args) -> str:
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    if args.payload is None or args.payload == "-":
        return sys.stdin.read()
    return args.payload


def _element(text: str, n: int) -> Tableau:
    """A word ``[2 1]`` or an exponent vector ``(1,0,0)``."""
    text = text.strip()
    if text.startswith("("):
        return from_exponents(parse_exponents(text, n))
    return p_map(parse_word(text), n)


def cmd_mult(args) -> list[str]:
    out = p_map((), args.rank)
    for item in args.elements:
        out = multiply(out, _element(item, args.rank), args.rank)
    if args.output == "exp":
        return [str(exponents_of(out, args.rank))]
    if args.output == "tableau":
        return [format_word(row_reading(out))] + format_tableau(out).splitlines()
    return [format_word(row_reading(out))]


def cmd_nf(args) -> list[str]:
    t = _element(args.word, args.rank)
    return [str(exponents_of(t, args.rank))]


def cmd_eq(args) -> list[str]:
    u, v = (row_reading(_element(x, args.rank)) for x in (args.u, args.v))
    return [_verdict(knuth_equal(u, v, args.rank))]


def cmd_decide(args) -> list[str]:
    f = parse_sentence(_payload(args))
    return [_verdict(decide_sentence(f, args.rank, budget=args.budget, method=args.method))]


def cmd_identity(args) -> list[str]:
    if args.rhs is not None:
        u, v = parse_term(args.lhs), parse_term(args.rhs)
    else:
        u, v = parse_equation(args.lhs)
    return [_verdict(check_identity(u, v, args.rank, budget=args.budget, method=args.method))]


def _witness_lines(result, n: int) -> list[str]:
    lines = []
    for var, ev in (result.witness or {}).items():
        lines.append(f"{var} = {ev} {format_word(row_reading(from_exponents(ev)))}")
    return lines


def cmd_solve(args) -> list[str]:
    system = parse_system(_payload(args))
    result = solve_system(system, args.rank, witness=args.witness, budget=args.budget,
                          method=args.method)
    return [_verdict(result.satisfiable)] + _witness_lines(result, args.rank)


def cmd_solve_inf(args) -> list[str]:
    system = parse_inf_system(_payload(args), args.alphabet)
    red, _ = reduce(system)
    result = solve_diophantine(system, witness=args.witness, budget=args.budget, method=args.method)
    lines = [_verdict(result.satisfiable), f"rank {red.rank}"]
    if red.relabel:
        lines.append("relabel " + " ".join(f"{a}->{b}" for a, b in red.relabel.items()))
    return lines + _witness_lines(result, red.rank)


def _dump_formula(n: int, part: str):
    name, _, arg = part.partition(":")
    if name == "S":
        return build_domain(n)
    if name == "eq":
        return build_equality(n)
    if name == "eta":
        return build_eta(n)
    if name == "eta-chain":
        return build_eta_chain(n)
    if name == "top":
        return build_top(n)
    if name == "bottom":
        return build_bottom(n)
    if name == "stitch":
        return build_stitch(n)
    if name in ("mu", "rho1", "rho2"):
        if not arg.isdigit():
            raise ValueError(f"part {name} needs a letter, e.g. {name}:1")
        x = int(arg)
        if name == "mu":
            return build_mu(n, x)
        return build_rho(n, x)[0 if name == "rho1" else 1]
    raise ValueError(f"unknown part {part!r}")


def cmd_interp_dump(args) -> list[str]:
    return [to_text(_dump_formula(args.rank, args.part))]


def cmd_pres_decide(args) -> list[str]:
    f = parse_formula(_payload(args))
    return [_verdict(decide(f, budget=args.budget, method=args.method))]


def _rank(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("rank must be >= 1")
    return n


def _budget(text: str) -> int:
    b = int(text)
    if b < 1:
        raise argparse.ArgumentTypeError("budget must be positive")
    return b


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plactic", description="Decision procedures for plactic monoids.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, rank=True, budget=False, payload=False):
        s = sub.add_parser(name, help=help_)
        s.set_defaults(func=fn)
        if rank:
            s.add_argument("--rank", "-n", type=_rank, required=True)
        if budget:
            s.add_argument("--budget", type=_budget, default=DEFAULT_BUDGET,
                           help="cap on live formula nodes")
            s.add_argument("--method", choices=METHODS, default="auto",
                           help="force quantifier elimination or the satisfiability search")
        if payload:
            s.add_argument("payload", nargs="?", help="inline input; '-' or absent reads stdin")
            s.add_argument("--file", "-f", help="read the input from a file")
        return s

    s = add("mult", cmd_mult, "multiply elements given as words or exponent vectors")
    s.add_argument("elements", nargs="+")
    s.add_argument("--output", choices=("word", "exp", "tableau"), default="word")
    s = add("nf", cmd_nf, "normal form as an exponent vector")
    s.add_argument("word")
    s = add("eq", cmd_eq, "word problem")
    s.add_argument("u")
    s.add_argument("v")
    add("decide", cmd_decide, "decide a first-order sentence", budget=True, payload=True)
    s = add("identity", cmd_identity, "check an identity u = v", budget=True)
    s.add_argument("lhs", help="'u = v', or u with v as the next argument")
    s.add_argument("rhs", nargs="?")
    s = add("solve", cmd_solve, "satisfiability of an equation system", budget=True, payload=True)
    s.add_argument("--witness", action="store_true")
    s = add("solve-inf", cmd_solve_inf, "equation systems over P(N) or P(Z)", rank=False, budget=True,
            payload=True)
    s.add_argument("--alphabet", type=alphabet_name, default="natural", help="nat or int")
    s.add_argument("--witness", action="store_true")
    s = add("interp-dump", cmd_interp_dump, "print an interpretation formula")
    s.add_argument("--part", default="eta",
                   help="S, eq, eta, eta-chain, top, bottom, stitch, mu:x, rho1:x, rho2:x")
    add("pres-decide", cmd_pres_decide, "decide a Presburger sentence", rank=False, budget=True, payload=True)
    return p


def _normalize(argv: list[str]) -> list[str]:
    if len(argv) >= 2 and (argv[0], argv[1]) in _TWO_WORD:
        return [_TWO_WORD[argv[0], argv[1]]] + argv[2:]
    return argv


def main(argv: Sequence[str] | None = None) -> int:
    argv = _normalize(list(sys.argv[1:] if argv is None else argv))
    first = next((a for a in argv if not a.startswith("-")), None)
    if first is not None and first not in COMMANDS:
        print(f"unknown subcommand {first!r}; expected one of {', '.join(COMMANDS)}", file=sys.stderr)
        return EXIT_USAGE
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_PARSE
    try:
        lines = args.func(args)
    except BudgetExceeded as e:
        print("BUDGET_EXCEEDED")
        print(f"budget exhausted: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    for line in lines:
        print(line)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
