"""Two-layer may/must logic, its satisfaction relations and the bounded
semi-decision procedures.

Concrete syntax::

    outer := conj ("or" conj)*          conj  := oatom ("and" oatom)*
    oatom := "may" inner | "must" inner | "true" | "false" | "(" outer ")"
    inner := iconj ("|" iconj)*          iconj := iatom ("&" iatom)*
    iatom := "P" "[" cond "]" ">" rational | "true" | "false" | "(" inner ")"

so ``may P[x = 1] > 1/2 | P[y = 0] > 0 and must P[true] > 3/4`` reads as
``(may (...|...)) and (must ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .backend import Backend
from .errors import BudgetExceeded, ParseError, UnsupportedFormula
from .extension import (BICONVEX, LOWER, UPPER, Engine, GenSet, normalize_mode,
                        order_leq, threshold_feasible)
from .smallstep import Config
from .syntax import Condition, Header, Parser, fmt_rational, pp_cond
from .valuation import Valuation, measure

# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


TOP, BOT = Top(), Bot()


@dataclass(frozen=True)
class Threshold:
    """Terminate in ``U`` with probability strictly greater than ``p``."""

    cond: Condition
    p: Fraction

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 <= p < 1:
            raise ValueError(f"threshold {p} outside [0, 1)")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class InnerAnd:
    items: tuple


@dataclass(frozen=True)
class InnerOr:
    items: tuple


@dataclass(frozen=True)
class May:
    body: object


@dataclass(frozen=True)
class Must:
    body: object


@dataclass(frozen=True)
class OuterAnd:
    items: tuple


@dataclass(frozen=True)
class OuterOr:
    items: tuple


@dataclass(frozen=True)
class Holds:
    witness_depth: int

    @property
    def status(self) -> str:
        return "holds"


@dataclass(frozen=True)
class Unknown:
    budget_exhausted_at: int
    reason: str | None = None

    @property
    def status(self) -> str:
        return "unknown"


Verdict = Holds | Unknown

# --------------------------------------------------------------------------
# Parsing and printing
# --------------------------------------------------------------------------


class _FormulaParser(Parser):
    def outer(self):
        items = [self.outer_conj()]
        while self.accept_word("or"):
            items.append(self.outer_conj())
        return items[0] if len(items) == 1 else OuterOr(tuple(items))

    def outer_conj(self):
        items = [self.outer_atom()]
        while self.accept_word("and"):
            items.append(self.outer_atom())
        return items[0] if len(items) == 1 else OuterAnd(tuple(items))

    def outer_atom(self):
        if self.accept_word("may"):
            return May(self.inner())
        if self.accept_word("must"):
            return Must(self.inner())
        if self.accept("true"):
            return TOP
        if self.accept("false"):
            return BOT
        if self.accept("("):
            f = self.outer()
            self.expect(")")
            return f
        self.error(f"expected 'may', 'must' or '(', found {self.describe(self.tok)}")

    def accept_word(self, word: str) -> bool:
        if self.tok.kind == "ident" and self.tok.text == word:
            self.advance()
            return True
        return False

    def inner(self):
        items = [self.inner_conj()]
        while self.accept("|"):
            items.append(self.inner_conj())
        return items[0] if len(items) == 1 else InnerOr(tuple(items))

    def inner_conj(self):
        items = [self.inner_atom()]
        while self.accept("&"):
            items.append(self.inner_atom())
        return items[0] if len(items) == 1 else InnerAnd(tuple(items))

    def inner_atom(self):
        if self.accept("true"):
            return TOP
        if self.accept("false"):
            return BOT
        if self.accept("("):
            f = self.inner()
            self.expect(")")
            return f
        if self.tok.text == "P" and self.peek().text == "[":
            self.advance()
            self.advance()
            cond = self.condition()
            self.expect("]")
            self.expect(">")
            t = self.tok
            p = self.rational()
            if not 0 <= p < 1:
                self.error(f"threshold {p} must lie in [0, 1)", t)
            return Threshold(cond, p)
        self.error(f"expected 'P[...] > p', found {self.describe(self.tok)}")


def parse_formula(text, header: Header | None = None):
    """Parse an outer (may/must) formula; conditions are checked against ``header``."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as e:
            from .errors import SourceSpan

            raise ParseError(f"invalid UTF-8: {e.reason}", SourceSpan(e.start, e.end)) from None
    p = _FormulaParser(text, header=header or Header())
    f = p.outer()
    p.expect_eof()
    return f


def format_formula(f) -> str:
    match f:
        case Top():
            return "true"
        case Bot():
            return "false"
        case Threshold(cond, p):
            return f"P[{pp_cond(cond)}] > {fmt_rational(p)}"
        case InnerAnd(items):
            return "(" + " & ".join(map(format_formula, items)) + ")"
        case InnerOr(items):
            return "(" + " | ".join(map(format_formula, items)) + ")"
        case May(body):
            return f"may {_atomic(body)}"
        case Must(body):
            return f"must {_atomic(body)}"
        case OuterAnd(items):
            return "(" + " and ".join(map(format_formula, items)) + ")"
        case OuterOr(items):
            return "(" + " or ".join(map(format_formula, items)) + ")"
    raise TypeError(f"not a formula: {f!r}")


def _atomic(body) -> str:
    s = format_formula(body)
    return s if isinstance(body, (Threshold, Top, Bot)) or s.startswith("(") else f"({s})"


# --------------------------------------------------------------------------
# Normal forms and the fragment gate
# --------------------------------------------------------------------------


def dnf(phi) -> list:
    """Inner formula as a list of conjunctions (frozensets of thresholds).

    ``[]`` is false and ``[frozenset()]`` is true.  Conjunctions implied by
    another disjunct are dropped.
    """
    match phi:
        case Top():
            out = [frozenset()]
        case Bot():
            out = []
        case Threshold():
            out = [frozenset([phi])]
        case InnerOr(items):
            out = [c for item in items for c in dnf(item)]
        case InnerAnd(items):
            out = [frozenset()]
            for item in items:
                out = [a | b for a in out for b in dnf(item)]
        case _:
            raise TypeError(f"not an inner formula: {phi!r}")
    out = list(dict.fromkeys(out))
    return [c for c in out if not any(d < c for d in out)]


def clauses(phi) -> list:
    """The May/Must sub-formulas of an outer formula."""
    match phi:
        case May() | Must():
            return [phi]
        case OuterAnd(items) | OuterOr(items):
            return [c for item in items for c in clauses(item)]
        case Top() | Bot():
            return []
    raise TypeError(f"not an outer formula: {phi!r}")


def check_fragment(phi, mode: str):
    """Raise :class:`UnsupportedFormula` unless ``phi`` is decidable in ``mode``."""
    mode = normalize_mode(mode)
    for c in clauses(phi):
        if isinstance(c, Must):
            if mode == LOWER:
                raise UnsupportedFormula(
                    "must-formulas are not observable in the lower powerdomain (mode l)")
            if len(dnf(c.body)) > 1:
                raise UnsupportedFormula(
                    "must bodies are limited to conjunctions of thresholds "
                    "(must (P[U1] > p1 & ... & P[Un] > pn)); "
                    f"{format_formula(c)} contains a disjunction")
        elif mode == UPPER:
            raise UnsupportedFormula(
                "may-formulas are not observable in the upper powerdomain (mode u)")


# --------------------------------------------------------------------------
# Satisfaction
# --------------------------------------------------------------------------


def _predicate(cond: Condition, backend: Backend) -> Callable:
    return lambda s: backend.interp_cond(cond, s)


def _constraints(conj, backend: Backend) -> list:
    return [(_predicate(t.cond, backend), t.p)
            for t in sorted(conj, key=format_formula)]


def sat_valuation(mu: Valuation, phi, backend: Backend) -> bool:
    """Does ``mu`` lie in the open set denoted by the inner formula ``phi``?"""
    match phi:
        case Top():
            return True
        case Bot():
            return False
        case Threshold(cond, p):
            return measure(mu, _predicate(cond, backend)) > p
        case InnerAnd(items):
            return all(sat_valuation(mu, x, backend) for x in items)
        case InnerOr(items):
            return any(sat_valuation(mu, x, backend) for x in items)
    raise TypeError(f"not an inner formula: {phi!r}")


def sat_clause(F: GenSet, clause, backend: Backend) -> bool:
    if isinstance(clause, May):
        return any(threshold_feasible(F, _constraints(conj, backend), "exists")
                   for conj in dnf(clause.body))
    disjuncts = dnf(clause.body)
    if not disjuncts:
        return False
    if len(disjuncts) > 1:
        raise UnsupportedFormula(f"{format_formula(clause)} is outside the must fragment")
    return threshold_feasible(F, _constraints(disjuncts[0], backend), "forall")


def _combine(phi, held: Callable) -> bool:
    match phi:
        case Top():
            return True
        case Bot():
            return False
        case May() | Must():
            return held(phi)
        case OuterAnd(items):
            return all(_combine(x, held) for x in items)
        case OuterOr(items):
            return any(_combine(x, held) for x in items)
    raise TypeError(f"not an outer formula: {phi!r}")


def sat_genset(F: GenSet, phi, mode: str, backend: Backend) -> bool:
    """``x(F) |= phi`` with ``x`` the mode's powerdomain."""
    check_fragment(phi, mode)
    return _combine(phi, lambda c: sat_clause(F, c, backend))


# --------------------------------------------------------------------------
# Procedures
# --------------------------------------------------------------------------


def semi_decide(c: Config, phi, mode: str, budget: int, backend: Backend,
                prune: bool = True, engine: Engine | None = None,
                on_level: Callable | None = None) -> Verdict:
    """Search ``F_1, ..., F_budget`` for a depth at which ``phi`` holds.

    A clause that held at some depth keeps holding at deeper ones (the
    approximants grow in the mode's order), so clauses are latched.
    ``Unknown`` never means the property fails.
    """
    check_fragment(phi, mode)
    engine = engine or Engine(backend, prune=prune)
    atoms = list(dict.fromkeys(clauses(phi)))
    held = set()
    for n in range(1, budget + 1):
        try:
            F = engine.gen_set(c, n)
            for a in atoms:
                if a not in held and sat_clause(F, a, backend):
                    held.add(a)
        except BudgetExceeded as e:
            return Unknown(n - 1, str(e))
        if on_level is not None:
            on_level(n, F)
        if _combine(phi, held.__contains__):
            return Holds(n)
    return Unknown(budget)


def refines(cP: Config, cQ: Config, mode: str, n: int, backend: Backend,
            prune: bool = True) -> bool:
    """Depth-``n`` approximation of the observational preorder ``P <~ Q``.

    Exact for programs whose executions all halt within ``n`` steps.
    """
    engine = Engine(backend, prune=prune)
    return order_leq(engine.gen_set(cP, n), engine.gen_set(cQ, n), mode)


__all__ = [
    "Top", "Bot", "TOP", "BOT", "Threshold", "InnerAnd", "InnerOr", "May", "Must",
    "OuterAnd", "OuterOr", "Holds", "Unknown", "parse_formula", "format_formula",
    "dnf", "check_fragment", "sat_valuation", "sat_genset", "semi_decide", "refines",
    "BICONVEX", "LOWER", "UPPER",
]
