"""One-step transition relation of concurrent pGCL.

``step(<P, s>)`` returns the finite set of full-probability valuations over
``Halt(s') | Resume(P', s')`` derivable from the inference rules for each
syntactic form.
"""

from __future__ import annotations

from typing import NamedTuple

from .backend import Backend
from .errors import BackendError, BudgetExceeded
from .syntax import (ATOMIC_TYPES, If, NChoice, Par, PChoice, Program, Seq, Skip,
                     While, pretty_print)
from .valuation import ONE, Halt, Resume, Valuation, combine, key_order

RULES = (
    "skip", "atomic", "seq", "par-left", "par-right", "pchoice",
    "nchoice-left", "nchoice-right", "if-true", "if-false",
    "while-true", "while-false",
)


class Config(NamedTuple):
    program: Program
    state: object


def _continue_with(mu: Valuation, wrap, halt) -> Valuation:
    def f(k):
        if isinstance(k, Resume):
            return Resume(wrap(k.program), k.state)
        return Resume(halt, k.state)

    return mu.map_keys(f)


def _derive(p: Program, s, backend: Backend, trace) -> list:
    def hit(rule):
        if trace is not None:
            trace.add(rule)

    if isinstance(p, Skip):
        hit("skip")
        return [Valuation.point(Halt(s))]
    if isinstance(p, ATOMIC_TYPES):
        hit("atomic")
        return [backend.interp_atomic(p, s).map_keys(Halt)]
    if isinstance(p, Seq):
        q = p.right
        hit("seq")
        return [_continue_with(mu, lambda pi: Seq(pi, q), q)
                for mu in _derive(p.left, s, backend, trace)]
    if isinstance(p, Par):
        left, right = p.left, p.right
        out = []
        lt = _derive(left, s, backend, trace)
        if lt:
            hit("par-left")
        out += [_continue_with(mu, lambda pi: Par(pi, right), right) for mu in lt]
        rt = _derive(right, s, backend, trace)
        if rt:
            hit("par-right")
        out += [_continue_with(mu, lambda qi: Par(left, qi), left) for mu in rt]
        return out
    if isinstance(p, PChoice):
        # both premises are derived even when p is 0 or 1
        mus = _derive(p.left, s, backend, trace)
        nus = _derive(p.right, s, backend, trace)
        hit("pchoice")
        q = ONE - p.prob
        return [combine([(p.prob, mu), (q, nu)]) for mu in mus for nu in nus]
    if isinstance(p, NChoice):
        lt = _derive(p.left, s, backend, trace)
        rt = _derive(p.right, s, backend, trace)
        hit("nchoice-left")
        hit("nchoice-right")
        return lt + rt
    if isinstance(p, If):
        if backend.interp_cond(p.cond, s):
            hit("if-true")
            return [Valuation.point(Resume(p.then, s))]
        hit("if-false")
        return [Valuation.point(Resume(p.orelse, s))]
    if isinstance(p, While):
        if backend.interp_cond(p.cond, s):
            hit("while-true")
            return [Valuation.point(Resume(Seq(p.body, p), s))]
        hit("while-false")
        return [Valuation.point(Halt(s))]
    raise TypeError(f"not a program: {p!r}")


def _canonical(vals) -> tuple:
    return tuple(sorted(set(vals), key=Valuation.sort_key))


def step(c: Config, backend: Backend, trace: set | None = None) -> tuple:
    """The transition set of ``c``: a sorted tuple of distinct valuations.

    Results are memoised per backend.  Passing a ``trace`` set records the
    names of the rules used (see :data:`RULES`) and bypasses the memo.
    """
    memo = _memo(backend)
    if trace is None:
        hit = memo.get(c)
        if hit is not None:
            return hit
    try:
        result = _canonical(_derive(c.program, c.state, backend, trace))
    except BackendError as e:
        if e.config is None:
            e.config = c
        raise
    if trace is None:
        memo[c] = result
    return result


def _memo(backend: Backend) -> dict:
    memo = getattr(backend, "_step_memo", None)
    if memo is None:
        memo = backend._step_memo = {}
    return memo


def reachable_states(c: Config, backend: Backend, n: int,
                     max_states: int = 100_000) -> frozenset:
    """States occurring in any outcome within ``n`` iterated steps of ``c``."""
    states = {c.state}
    frontier = {c}
    seen = {c}
    for _ in range(n):
        nxt = set()
        for cfg in frontier:
            for mu in step(cfg, backend):
                for k in mu:
                    states.add(k.state)
                    if isinstance(k, Resume):
                        rc = Config(k.program, k.state)
                        if rc not in seen:
                            seen.add(rc)
                            nxt.add(rc)
            if len(states) > max_states or len(seen) > max_states:
                raise BudgetExceeded(f"more than {max_states} reachable states/configs")
        frontier = nxt
    return frozenset(states)


# -- debug trace ------------------------------------------------------------


def format_config(c: Config, backend: Backend) -> str:
    return f"<{pretty_print(c.program)} | {backend.format_state(c.state)}>"


def format_transition(mu: Valuation, backend: Backend) -> str:
    parts = []
    for k, w in mu.sorted_items():
        if isinstance(k, Resume):
            body = format_config(Config(k.program, k.state), backend)
        else:
            body = backend.format_state(k.state)
        parts.append(f"{w}*{body}")
    return " + ".join(parts) if parts else "0"


def trace_lines(c: Config, backend: Backend) -> list[str]:
    """One ``<config> --> <valuation>`` line per derived transition."""
    head = format_config(c, backend)
    return [f"{head} --> {format_transition(mu, backend)}" for mu in step(c, backend)]


__all__ = [
    "Config", "Halt", "Resume", "RULES", "step", "reachable_states",
    "format_config", "format_transition", "trace_lines", "key_order",
]
