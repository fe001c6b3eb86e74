"""Scheduler-driven big-step evaluation: the operational oracle.

A scheduler maps histories to distributions over the transitions available
at the current configuration.  :func:`evaluate` runs one scheduler for ``n``
steps; :func:`det_outcomes` enumerates everything reachable by schedulers
that always pick a single transition, choosing independently per history.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import NamedTuple

from .backend import Backend
from .errors import BudgetExceeded
from .smallstep import Config, step
from .valuation import BOTTOM, ONE, Halt, Valuation, combine, leq


class History(NamedTuple):
    """Past ``(config, chosen transition)`` pairs and the current config."""

    past: tuple
    current: Config

    @classmethod
    def start(cls, c: Config) -> "History":
        return cls((), c)

    def extend(self, nu: Valuation, nxt: Config) -> "History":
        return History(self.past + ((self.current, nu),), nxt)

    def __len__(self):
        return len(self.past)


class RandomizedScheduler:
    """A finite partial map from histories to distributions over transition
    indices (positions in the sorted :func:`step` tuple)."""

    def __init__(self, table: dict | None = None):
        self.table = dict(table or {})

    def __call__(self, h: History):
        return self.table.get(h)

    def __repr__(self):
        return f"{type(self).__name__}({len(self.table)} decisions)"


class LazyRandomScheduler(RandomizedScheduler):
    """Draws a random distribution the first time each history is queried.

    Decisions are stored, so the scheduler is a fixed (finite, partial) map
    once the queries are done.  ``block_prob`` leaves a history undefined
    with that probability.
    """

    def __init__(self, backend: Backend, rng: random.Random | int | None = None,
                 max_support: int = 3, max_weight: int = 4, block_prob: float = 0.0):
        super().__init__()
        self.backend = backend
        self.rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        self.max_support = max_support
        self.max_weight = max_weight
        self.block_prob = block_prob
        self._blocked = set()

    def __call__(self, h: History):
        if h in self.table:
            return self.table[h]
        if h in self._blocked:
            return None
        rng = self.rng
        if self.block_prob and rng.random() < self.block_prob:
            self._blocked.add(h)
            return None
        k = len(step(h.current, self.backend))
        idx = rng.sample(range(k), rng.randint(1, min(k, self.max_support)))
        raw = [rng.randint(1, self.max_weight) for _ in idx]
        total = sum(raw)
        dist = tuple(sorted((i, Fraction(r, total)) for i, r in zip(idx, raw)))
        self.table[h] = dist
        return dist


def evaluate(sch, h: History | Config, n: int, backend: Backend) -> Valuation | None:
    """The ``n``-step big-step outcome of ``sch`` from ``h``; ``None`` if blocked."""
    if isinstance(h, Config):
        h = History.start(h)
    if n == 0:
        return BOTTOM
    dist = sch(h)
    if dist is None:
        return None
    transitions = step(h.current, backend)
    terms = []
    for idx, pk in dist:
        nu = transitions[idx]
        for key, w in nu.items():
            if isinstance(key, Halt):
                terms.append((pk * w, Valuation.point(key.state)))
            else:
                mu = evaluate(sch, h.extend(nu, Config(key.program, key.state)),
                              n - 1, backend)
                if mu is None:
                    return None
                terms.append((pk * w, mu))
    return combine(terms)


def _outcomes(h: History, n: int, backend: Backend, cap: int, witnesses: bool) -> dict:
    """Map each deterministic ``n``-step outcome from ``h`` to a witness table."""
    if n == 0:
        return {BOTTOM: {}}
    out = {}
    for idx, nu in enumerate(step(h.current, backend)):
        halted = []
        branches = []
        for key, w in nu.items():
            if isinstance(key, Halt):
                halted.append((w, Valuation.point(key.state)))
            else:
                sub = _outcomes(h.extend(nu, Config(key.program, key.state)),
                                n - 1, backend, cap, witnesses)
                branches.append((w, list(sub.items())))
        for choice in itertools.product(*(opts for _, opts in branches)):
            mu = combine(halted + [(w, m) for (w, _), (m, _) in zip(branches, choice)])
            if mu in out:
                continue
            if witnesses:
                table = {h: ((idx, ONE),)}
                for _, t in choice:
                    table.update(t)
                out[mu] = table
            else:
                out[mu] = None
            if len(out) > cap:
                raise BudgetExceeded(f"more than {cap} deterministic outcomes", depth=n)
    return out


def det_outcomes(c: Config, n: int, backend: Backend, cap: int = 100_000) -> frozenset:
    """All ``n``-step outcomes of deterministic schedulers from ``c``."""
    return frozenset(_outcomes(History.start(c), n, backend, cap, witnesses=False))


def det_witnesses(c: Config, n: int, backend: Backend, cap: int = 100_000) -> dict:
    """Like :func:`det_outcomes`, with a scheduler realising each outcome."""
    found = _outcomes(History.start(c), n, backend, cap, witnesses=True)
    return {mu: RandomizedScheduler(t) for mu, t in found.items()}


def check_determinism(sch, c: Config, n: int, backend: Backend) -> bool:
    return evaluate(sch, c, n, backend) == evaluate(sch, c, n, backend)


def check_monotonicity(sch, c: Config, n: int, backend: Backend) -> bool:
    mu = evaluate(sch, c, n, backend)
    nu = evaluate(sch, c, n + 1, backend)
    if mu is None or nu is None:
        return True  # the property only constrains defined evaluations
    return leq(mu, nu)


def nonblocking_upto(sch, c: Config, n: int, backend: Backend) -> bool:
    """Whether ``sch`` yields an outcome for every depth ``<= n``."""
    return all(evaluate(sch, c, k, backend) is not None for k in range(n + 1))
