"""First-order sentences over plactic monoids and their Presburger translation.

Grammar::

    mterm := "eps" | "[" int* "]" | var | mterm "." mterm
    mform := mterm "=" mterm | mterm "!=" mterm | "!" mform | mform "&" mform
           | mform "or" mform | mform "->" mform | mform "<->" mform
           | "(" mform ")" | ("exists"|"forall") var ":" mform | "true" | "false"

A bracketed word ``[2 1]`` denotes the product of its letters.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

from .columns import ExponentVector, from_exponents, normal_form
from .interpretation import Interpretation, domain_formula, generate, instantiate
from .presburger import formula as F
from .presburger.formula import DEFAULT_BUDGET, Formula
from .presburger.decide import decide
from .presburger.terms import LinearTerm
from .tableaux import LetterRangeError, Tableau, multiply, p_map


class SentenceSyntaxError(ValueError):
    pass


# Syntax ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Word:
    """A constant: the product of the given letters (empty for eps)."""
    letters: tuple[int, ...]


@dataclass(frozen=True)
class Concat:
    left: "MonoidTerm"
    right: "MonoidTerm"


MonoidTerm = Union[Var, Word, Concat]
EPS = Word(())


@dataclass(frozen=True)
class Equals:
    left: MonoidTerm
    right: MonoidTerm


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Not:
    body: "MonoidFormula"


@dataclass(frozen=True)
class Connective:
    op: str  # "and", "or", "implies", "iff"
    left: "MonoidFormula"
    right: "MonoidFormula"


@dataclass(frozen=True)
class Quantified:
    kind: str  # "exists" or "forall"
    var: str
    body: "MonoidFormula"


MonoidFormula = Union[Equals, Truth, Not, Connective, Quantified]


def factors(t: MonoidTerm) -> list[Union[Var, Word]]:
    """Left-to-right factors of a term."""
    if isinstance(t, Concat):
        return factors(t.left) + factors(t.right)
    return [t]


def term_vars(t: MonoidTerm) -> list[str]:
    out: list[str] = []
    for f in factors(t):
        if isinstance(f, Var) and f.name not in out:
            out.append(f.name)
    return out


def free_vars(f: MonoidFormula) -> list[str]:
    """Free variables in order of first occurrence."""
    out: list[str] = []

    def add(names):
        for v in names:
            if v not in out:
                out.append(v)

    def go(g, bound):
        if isinstance(g, Equals):
            add(v for v in term_vars(g.left) + term_vars(g.right) if v not in bound)
        elif isinstance(g, Not):
            go(g.body, bound)
        elif isinstance(g, Connective):
            go(g.left, bound)
            go(g.right, bound)
        elif isinstance(g, Quantified):
            go(g.body, bound | {g.var})

    go(f, frozenset())
    return out


def letters_of(f: MonoidFormula) -> set[int]:
    out: set[int] = set()

    def term(t):
        for x in factors(t):
            if isinstance(x, Word):
                out.update(x.letters)

    def go(g):
        if isinstance(g, Equals):
            term(g.left)
            term(g.right)
        elif isinstance(g, Not):
            go(g.body)
        elif isinstance(g, Connective):
            go(g.left)
            go(g.right)
        elif isinstance(g, Quantified):
            go(g.body)

    go(f)
    return out


def format_term(t: MonoidTerm) -> str:
    parts = []
    for f in factors(t):
        if isinstance(f, Var):
            parts.append(f.name)
        elif f.letters:
            parts.append("[" + " ".join(map(str, f.letters)) + "]")
        else:
            parts.append("eps")
    return " . ".join(parts)


def format_formula(f: MonoidFormula) -> str:
    if isinstance(f, Equals):
        return f"{format_term(f.left)} = {format_term(f.right)}"
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return f"!({format_formula(f.body)})"
    if isinstance(f, Connective):
        op = {"and": "&", "or": "or", "implies": "->", "iff": "<->"}[f.op]
        return f"({format_formula(f.left)} {op} {format_formula(f.right)})"
    return f"({f.kind} {f.var}: {format_formula(f.body)})"


def map_letters(f, fn):
    """Apply ``fn`` to every letter constant of a term or formula."""
    if isinstance(f, Word):
        return Word(tuple(fn(x) for x in f.letters))
    if isinstance(f, Var):
        return f
    if isinstance(f, Concat):
        return Concat(map_letters(f.left, fn), map_letters(f.right, fn))
    if isinstance(f, Equals):
        return Equals(map_letters(f.left, fn), map_letters(f.right, fn))
    if isinstance(f, Truth):
        return f
    if isinstance(f, Not):
        return Not(map_letters(f.body, fn))
    if isinstance(f, Connective):
        return Connective(f.op, map_letters(f.left, fn), map_letters(f.right, fn))
    return Quantified(f.kind, f.var, map_letters(f.body, fn))


# Parsing --------------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>-?\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op><->|->|!=|!|&|=|\.|\[|\]|\(|\)|:|,|∘))"
)
_KEYWORDS = {"eps", "or", "exists", "forall", "true", "false"}


def _tokenize(text: str) -> list[str]:
    toks, pos = [], 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SentenceSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        toks.append(m.group(m.lastgroup))
    return toks


class _Parser:
    def __init__(self, text: str, signed: bool):
        self.toks = _tokenize(text)
        self.i = 0
        self.signed = signed

    def peek(self, off=0):
        j = self.i + off
        return self.toks[j] if j < len(self.toks) else None

    def take(self, want=None):
        t = self.peek()
        if t is None or (want is not None and t != want):
            raise SentenceSyntaxError(f"expected {want or 'more input'!r}, got {t!r}")
        self.i += 1
        return t

    def done(self):
        if self.peek() is not None:
            raise SentenceSyntaxError(f"trailing input at {self.peek()!r}")

    def formula(self):
        f = self.implication()
        while self.peek() == "<->":
            self.take()
            f = Connective("iff", f, self.implication())
        return f

    def implication(self):
        f = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Connective("implies", f, self.implication())
        return f

    def disjunction(self):
        f = self.conjunction()
        while self.peek() == "or":
            self.take()
            f = Connective("or", f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = Connective("and", f, self.unary())
        return f

    def unary(self):
        t = self.peek()
        if t == "!":
            self.take()
            return Not(self.unary())
        if t in ("exists", "forall"):
            self.take()
            var = self.variable()
            self.take(":")
            return Quantified(t, var, self.formula())
        if t in ("true", "false"):
            self.take()
            return Truth(t == "true")
        if t == "(" and self._paren_is_formula():
            self.take()
            f = self.formula()
            self.take(")")
            return f
        lhs = self.term()
        op = self.take()
        if op not in ("=", "!="):
            raise SentenceSyntaxError(f"expected '=' or '!=', got {op!r}")
        eq = Equals(lhs, self.term())
        return eq if op == "=" else Not(eq)

    def _paren_is_formula(self) -> bool:
        """Distinguish ``(x . y) = z`` from ``(x = y & ...)``."""
        depth = 0
        for j in range(self.i, len(self.toks)):
            t = self.toks[j]
            if t == "(":
                depth += 1
            elif t == ")":
                depth -= 1
                if depth == 0:
                    nxt = self.toks[j + 1] if j + 1 < len(self.toks) else None
                    return nxt not in (".", "∘", "=", "!=")
            elif depth == 1 and t in ("=", "!=", "!", "&", "or", "->", "<->", "exists", "forall"):
                return True
        return True

    def variable(self) -> str:
        t = self.take()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", t) or t in _KEYWORDS:
            raise SentenceSyntaxError(f"expected a variable, got {t!r}")
        return t

    def term(self):
        t = self.factor()
        while self.peek() in (".", "∘"):
            self.take()
            t = Concat(t, self.factor())
        return t

    def factor(self):
        t = self.peek()
        if t == "eps":
            self.take()
            return EPS
        if t == "[":
            self.take()
            letters = []
            while self.peek() not in ("]", None):
                tok = self.take()
                if tok == ",":
                    continue
                if not re.fullmatch(r"-?\d+", tok):
                    raise SentenceSyntaxError(f"expected a letter, got {tok!r}")
                x = int(tok)
                if not self.signed and x < 1:
                    raise SentenceSyntaxError(f"letter {x} must be positive")
                letters.append(x)
            self.take("]")
            return Word(tuple(letters))
        if t is not None and re.fullmatch(r"-?\d+", t):
            # a bare letter constant
            self.take()
            x = int(t)
            if not self.signed and x < 1:
                raise SentenceSyntaxError(f"letter {x} must be positive")
            return Word((x,))
        if t == "(":
            self.take()
            inner = self.term()
            self.take(")")
            return inner
        return Var(self.variable())


def parse_sentence(text: str, signed: bool = False) -> MonoidFormula:
    p = _Parser(text, signed)
    f = p.formula()
    p.done()
    return f


def parse_term(text: str, signed: bool = False) -> MonoidTerm:
    p = _Parser(text, signed)
    t = p.term()
    p.done()
    return t


def parse_equation(text: str, signed: bool = False) -> tuple[MonoidTerm, MonoidTerm]:
    p = _Parser(text, signed)
    lhs = p.term()
    p.take("=")
    rhs = p.term()
    p.done()
    return lhs, rhs


@dataclass(frozen=True)
class EquationSystem:
    equations: tuple[tuple[MonoidTerm, MonoidTerm], ...]

    def __post_init__(self):
        if not self.equations:
            raise SentenceSyntaxError("an equation system needs at least one equation")

    @property
    def variables(self) -> list[str]:
        out: list[str] = []
        for l, r in self.equations:
            for v in term_vars(l) + term_vars(r):
                if v not in out:
                    out.append(v)
        return out

    def letters(self) -> set[int]:
        return letters_of(self.as_formula())

    def as_formula(self) -> MonoidFormula:
        f: MonoidFormula = Equals(*self.equations[0])
        for l, r in self.equations[1:]:
            f = Connective("and", f, Equals(l, r))
        return f


def parse_system(text: str, signed: bool = False) -> EquationSystem:
    """One equation per line; blank lines and ``#`` comments are skipped.  ``;`` also separates."""
    eqs = []
    for line in re.split(r"[\n;]", text):
        line = line.split("#", 1)[0].strip()
        if line:
            eqs.append(parse_equation(line, signed))
    return EquationSystem(tuple(eqs))


# Translation ------------------------------------------------------------------------

class Translator:
    """Builds the Presburger image of monoid formulas at a fixed rank."""

    def __init__(self, interp: Interpretation, content_hints: bool = True):
        self.interp = interp
        self.content_hints = content_hints
        self.n = interp.n
        self.k = interp.k
        self.fresh = 0

    def block(self, name: str) -> list[LinearTerm]:
        return [LinearTerm.var(f"{name}_{i}") for i in range(1, self.k + 1)]

    def names(self, name: str) -> list[str]:
        return [f"{name}_{i}" for i in range(1, self.k + 1)]

    def constant(self, letters: Sequence[int]) -> list[LinearTerm]:
        for x in letters:
            if not 1 <= x <= self.n:
                raise LetterRangeError(f"letter {x} outside [1, {self.n}]")
        return [LinearTerm(v) for v in normal_form(letters, self.n).v]

    def term(self, t: MonoidTerm, env: dict, blocks: list, parts: list,
             hints: list | None = None) -> list[LinearTerm]:
        """Vector denoting ``t``; products add fresh blocks and multiplication constraints.

        Implied linear constraints go to ``hints`` (or ``parts`` when absent).
        """
        items: list = []
        for f in factors(t):
            if isinstance(f, Var):
                if f.name not in env:
                    raise SentenceSyntaxError(f"unbound variable {f.name!r}")
                items.append(env[f.name])
            elif items and isinstance(items[-1], Word):
                items[-1] = Word(items[-1].letters + f.letters)  # fold adjacent constants
            else:
                items.append(f)
        vecs = [self.constant(x.letters) if isinstance(x, Word) else x for x in items
                if not (isinstance(x, Word) and not x.letters)]
        if not vecs:
            return self.constant(())
        acc = vecs[0]
        for nxt in vecs[1:]:
            self.fresh += 1
            name = f"p{self.fresh}"
            out = self.block(name)
            blocks.extend(self.names(name))
            parts.append(self.interp.multiply_formula(acc, nxt, out))
            if self.content_hints:
                (parts if hints is None else hints).append(self.interp.content_formula(acc, nxt, out))
            acc = out
        return acc

    def formula(self, f: MonoidFormula, env: dict, positive: bool = True, mode: str = "exists") -> Formula:
        """Image of ``f``; ``positive`` is the polarity of the occurrence and
        ``mode`` the kind (after pushing negations inward) of the innermost
        enclosing quantifier.

        Products are graphs of total functions, so an equation can be read
        either as "some product values satisfy it" or as "all product values
        do".  The reading is chosen so that the product blocks, once negations
        are pushed inward, are quantified like their surroundings; a purely
        existential or purely universal sentence then stays so.
        """
        if isinstance(f, Equals):
            blocks: list = []
            parts: list = []
            hints: list = []
            lhs = self.term(f.left, env, blocks, parts, hints)
            rhs = self.term(f.right, env, blocks, parts, hints)
            same = F.and_(*[F.eq(x, y) for x, y in zip(lhs, rhs)])
            # cheap linear constraints first: solvers assert conjuncts in order
            if not blocks or (mode == "exists") == positive:
                return F.exists(blocks, F.and_(*hints, same, *parts))
            return F.forall(blocks, F.implies(F.and_(*hints, *parts), same))
        if isinstance(f, Truth):
            return F.const(f.value)
        if isinstance(f, Not):
            return F.not_(self.formula(f.body, env, not positive, mode))
        if isinstance(f, Connective):
            if f.op == "iff":
                a, b = self.formula(f.left, env, True, mode), self.formula(f.right, env, True, mode)
                return F.iff(a, b)
            if f.op == "implies":
                return F.implies(self.formula(f.left, env, not positive, mode),
                                 self.formula(f.right, env, positive, mode))
            a, b = self.formula(f.left, env, positive, mode), self.formula(f.right, env, positive, mode)
            return (F.and_ if f.op == "and" else F.or_)(a, b)
        self.fresh += 1
        name = f"v{self.fresh}{f.var}"
        vec = self.block(name)
        inner = dict(env)
        inner[f.var] = vec
        kind = f.kind if positive else ("forall" if f.kind == "exists" else "exists")
        body = self.formula(f.body, inner, positive, kind)
        guard = domain_formula(self.n, vec)
        if f.kind == "exists":
            return F.exists(self.names(name), F.and_(guard, body))
        return F.forall(self.names(name), F.implies(guard, body))


def translate(f: MonoidFormula, interp: Interpretation | int) -> Formula:
    """Presburger sentence equivalent to the closed monoid sentence ``f``."""
    if isinstance(interp, int):
        interp = generate(interp)
    fv = free_vars(f)
    if fv:
        raise SentenceSyntaxError(f"sentence has free variables {fv}")
    return Translator(interp).formula(f, {})


def _check_rank(n: int) -> None:
    if n < 1:
        raise ValueError("rank must be >= 1")


def decide_sentence(f: MonoidFormula | str, n: int, budget: int = DEFAULT_BUDGET, method: str = "auto") -> bool:
    """Truth of a closed sentence in P_n."""
    _check_rank(n)
    if isinstance(f, str):
        f = parse_sentence(f)
    return decide(translate(f, generate(n)), budget=budget, method=method)


def universal_closure(f: MonoidFormula) -> MonoidFormula:
    for v in reversed(free_vars(f)):
        f = Quantified("forall", v, f)
    return f


def existential_closure(f: MonoidFormula) -> MonoidFormula:
    for v in reversed(free_vars(f)):
        f = Quantified("exists", v, f)
    return f


def check_identity(u: MonoidTerm | str, v: MonoidTerm | str, n: int, budget: int = DEFAULT_BUDGET,
                   method: str = "auto") -> bool:
    """Whether ``u = v`` holds in P_n for every assignment of its variables."""
    if isinstance(u, str):
        u = parse_term(u)
    if isinstance(v, str):
        v = parse_term(v)
    return decide_sentence(universal_closure(Equals(u, v)), n, budget, method)


@dataclass(frozen=True)
class SolveResult:
    satisfiable: bool
    witness: dict[str, ExponentVector] | None = None

    def __bool__(self) -> bool:
        return self.satisfiable


def solve_system(
    sys: EquationSystem | str,
    n: int,
    witness: bool = False,
    budget: int = DEFAULT_BUDGET,
    method: str = "auto",
) -> SolveResult:
    """Satisfiability of an equation system in P_n, optionally with a solution.

    A solution is found one coordinate at a time: an upper bound is found by
    doubling, then the least feasible value by bisection, then that value is
    pinned before moving on.  Each probe is a full decision.
    """
    _check_rank(n)
    if isinstance(sys, str):
        sys = parse_system(sys)
    interp = generate(n)
    tr = Translator(interp)
    variables = sys.variables
    env = {v: tr.block(f"x{v}") for v in variables}
    names = [name for v in variables for name in tr.names(f"x{v}")]
    body = F.and_(*[domain_formula(n, env[v]) for v in variables],
                  *[tr.formula(Equals(l, r), env) for l, r in sys.equations])

    def sat(extra: Formula) -> bool:
        return decide(F.exists(names, F.and_(body, extra)), budget=budget, method=method)

    if not sat(F.TRUE):
        return SolveResult(False)
    if not witness:
        return SolveResult(True)
    pinned: list[Formula] = []
    values: dict[str, list[int]] = {v: [] for v in variables}
    for v in variables:
        for coord in env[v]:
            fixed = F.and_(*pinned)
            hi = 0
            while not sat(F.and_(fixed, F.le(coord, hi))):
                hi = 1 if hi == 0 else 2 * hi
            lo = 0 if hi == 0 else hi // 2 + 1
            while lo < hi:
                mid = (lo + hi) // 2
                if sat(F.and_(fixed, F.le(coord, mid))):
                    hi = mid
                else:
                    lo = mid + 1
            pinned.append(F.eq(coord, lo))
            values[v].append(lo)
    return SolveResult(True, {v: ExponentVector(n, tuple(values[v])) for v in variables})


# Ground evaluation and bounded search (independent of the interpretation) ------------

def eval_term(t: MonoidTerm, assignment: dict[str, Tableau], n: int) -> Tableau:
    out = p_map((), n)
    for f in factors(t):
        out = multiply(out, assignment[f.name] if isinstance(f, Var) else p_map(f.letters, n), n)
    return out


def holds_in(f: MonoidFormula, assignment: dict[str, Tableau], n: int, domain: Sequence[Tableau]) -> bool:
    """Truth of ``f`` with quantifiers ranging over the finite ``domain`` only."""
    if isinstance(f, Equals):
        return eval_term(f.left, assignment, n) == eval_term(f.right, assignment, n)
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not holds_in(f.body, assignment, n, domain)
    if isinstance(f, Connective):
        a = holds_in(f.left, assignment, n, domain)
        if f.op == "and":
            return a and holds_in(f.right, assignment, n, domain)
        if f.op == "or":
            return a or holds_in(f.right, assignment, n, domain)
        if f.op == "implies":
            return (not a) or holds_in(f.right, assignment, n, domain)
        return a == holds_in(f.right, assignment, n, domain)
    results = (holds_in(f.body, {**assignment, f.var: t}, n, domain) for t in domain)
    return any(results) if f.kind == "exists" else all(results)


def search_solutions(sys: EquationSystem, n: int, domain: Sequence[Tableau]) -> Iterator[dict[str, Tableau]]:
    """Solutions of ``sys`` with every variable drawn from ``domain``."""
    import itertools

    variables = sys.variables
    for combo in itertools.product(domain, repeat=len(variables)):
        a = dict(zip(variables, combo))
        if all(eval_term(l, a, n) == eval_term(r, a, n) for l, r in sys.equations):
            yield a


def witness_tableaux(result: SolveResult) -> dict[str, Tableau]:
    return {v: from_exponents(ev) for v, ev in (result.witness or {}).items()}


__all__ = [
    "Concat", "Connective", "EPS", "EquationSystem", "Equals", "Not", "Quantified", "SentenceSyntaxError",
    "SolveResult", "Translator", "Truth", "Var", "Word", "check_identity", "decide_sentence",
    "eval_term", "existential_closure", "format_formula", "format_term", "free_vars",
    "holds_in", "letters_of", "map_letters", "parse_equation", "parse_sentence", "parse_system",
    "parse_term", "search_solutions", "solve_system", "translate", "universal_closure", "witness_tableaux",
]
