"""Finite generating sets of the denotational approximants, and exact convex
geometry over them.

``gen_set(<P, s>, n)`` returns a finite set ``F`` of subprobability
valuations over states whose convex hull is the depth-``n`` approximant of
``P`` at ``s``.  All queries (hull membership, order comparisons, threshold
feasibility) are decided by exact rational LP.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import lp
from .backend import Backend
from .errors import BudgetExceeded
from .smallstep import Config, step
from .valuation import BOTTOM, ZERO, Halt, Resume, Valuation, add, measure, scale

# --------------------------------------------------------------------------
# Generating sets
# --------------------------------------------------------------------------


class GenSet:
    """A non-empty finite set of valuations, viewed through its convex hull."""

    __slots__ = ("members", "_support", "extreme")

    def __init__(self, members: Iterable[Valuation], extreme: bool = False):
        self.members = frozenset(members)
        if not self.members:
            raise ValueError("a generating set is never empty")
        self._support = None
        self.extreme = extreme  # known to consist of extreme points only

    @property
    def support(self) -> list:
        """Sorted union of member supports: the ambient coordinates."""
        if self._support is None:
            keys = set()
            for v in self.members:
                keys.update(v)
            self._support = sorted(keys, key=lambda s: s.sort_key())
        return self._support

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v) -> bool:
        return v in self.members

    def __eq__(self, other):
        if isinstance(other, GenSet):
            return self.members == other.members
        if isinstance(other, (set, frozenset)):
            return self.members == other
        return NotImplemented

    def __hash__(self):
        return hash(self.members)

    def sorted(self) -> list:
        return sorted(self.members, key=Valuation.sort_key)

    def to_json(self, state_json: Callable) -> list:
        return [v.to_json(state_json) for v in self.sorted()]

    def __repr__(self):
        return f"GenSet({self.sorted()!r})"


BOTTOM_SET = GenSet([BOTTOM], extreme=True)

# --------------------------------------------------------------------------
# Convex geometry
# --------------------------------------------------------------------------


def _as_list(gens) -> list:
    return list(gens.members if isinstance(gens, GenSet) else gens)


def conv_member(target: Valuation, generators) -> bool:
    """Is ``target`` a convex combination of ``generators``?"""
    gens = _as_list(generators)
    if target in gens:
        return True
    supp = target.support()
    # generators charging a coordinate where the target is zero cannot be used
    usable = [g for g in gens if g.support() <= supp]
    if not usable:
        return False
    coords = sorted(supp, key=lambda s: s.sort_key())
    A_eq = [[g[s] for g in usable] for s in coords]
    b_eq = [target[s] for s in coords]
    A_eq.append([1] * len(usable))
    b_eq.append(1)
    return lp.feasible(len(usable), A_eq=A_eq, b_eq=b_eq) is not None


def _certified_extreme(pts: list) -> list:
    """Flags for points that uniquely maximise or minimise a coordinate or the mass."""
    n = len(pts)
    flags = [False] * n
    coords = set()
    for v in pts:
        coords.update(v)
    functionals = [lambda v, s=s: v[s] for s in coords]
    functionals.append(lambda v: v.mass)
    for f in functionals:
        vals = [f(v) for v in pts]
        hi, lo = max(vals), min(vals)
        if vals.count(hi) == 1:
            flags[vals.index(hi)] = True
        if vals.count(lo) == 1:
            flags[vals.index(lo)] = True
    return flags


def prune_extreme(F) -> GenSet:
    """Drop every point that is a convex combination of the others.

    The result is the set of extreme points of ``conv F``; it does not depend
    on the scan order.
    """
    if isinstance(F, GenSet) and F.extreme:
        return F
    pts = sorted(set(_as_list(F)), key=Valuation.sort_key)
    if len(pts) <= 2:
        return GenSet(pts, extreme=True)
    keep = _certified_extreme(pts)
    alive = list(range(len(pts)))
    for i in range(len(pts)):
        if keep[i]:
            continue
        others = [pts[j] for j in alive if j != i]
        if conv_member(pts[i], others):
            alive.remove(i)
    return GenSet((pts[j] for j in alive), extreme=True)


def _dominated_by_hull(mu: Valuation, gens: list) -> bool:
    """Is there ``nu`` in ``conv gens`` with ``mu <= nu`` pointwise?"""
    if any(mu <= g for g in gens):
        return True
    coords = sorted(mu.support(), key=lambda s: s.sort_key())
    A_ub = [[-g[s] for g in gens] for s in coords]
    b_ub = [-mu[s] for s in coords]
    return lp.feasible(len(gens), A_ub=A_ub, b_ub=b_ub,
                       A_eq=[[1] * len(gens)], b_eq=[1]) is not None


def _dominates_hull(nu: Valuation, gens: list) -> bool:
    """Is there ``mu`` in ``conv gens`` with ``mu <= nu`` pointwise?"""
    if any(g <= nu for g in gens):
        return True
    supp = nu.support()
    usable = [g for g in gens if g.support() <= supp]
    if not usable:
        return False
    coords = sorted(supp, key=lambda s: s.sort_key())
    A_ub = [[g[s] for g in usable] for s in coords]
    b_ub = [nu[s] for s in coords]
    return lp.feasible(len(usable), A_ub=A_ub, b_ub=b_ub,
                       A_eq=[[1] * len(usable)], b_eq=[1]) is not None


LOWER, UPPER, BICONVEX = "l", "u", "b"
_MODE_ALIASES = {"l": LOWER, "lower": LOWER, "u": UPPER, "upper": UPPER,
                 "b": BICONVEX, "biconvex": BICONVEX}


def normalize_mode(mode: str) -> str:
    try:
        return _MODE_ALIASES[mode]
    except KeyError:
        raise ValueError(f"unknown mode {mode!r}; expected l, u or b") from None


def order_leq(F, G, mode: str) -> bool:
    """Compare the hulls in the lower, upper or biconvex powerdomain order.

    lower: ``down(conv F) <= down(conv G)``; upper: ``up(conv G) <= up(conv F)``.
    """
    mode = normalize_mode(mode)
    ext_f = list(prune_extreme(F))
    ext_g = list(prune_extreme(G))
    if mode in (LOWER, BICONVEX):
        if not all(_dominated_by_hull(mu, ext_g) for mu in ext_f):
            return False
    if mode in (UPPER, BICONVEX):
        if not all(_dominates_hull(nu, ext_f) for nu in ext_g):
            return False
    return True


Constraint = tuple  # (predicate over states, Fraction threshold)


def exists_slack(F, constraints: Sequence[Constraint]) -> Fraction | None:
    """Largest ``eps`` in ``[0, 1]`` such that some ``mu`` in ``conv F`` has
    ``mu(U_k) >= p_k + eps`` for every constraint, or ``None`` if none does.
    """
    gens = _as_list(F)
    m = len(gens)
    # variables: lambda_1..lambda_m, eps
    A_ub, b_ub = [], []
    for pred, p in constraints:
        A_ub.append([-measure(g, pred) for g in gens] + [1])
        b_ub.append(-Fraction(p))
    A_ub.append([0] * m + [1])
    b_ub.append(1)
    res = lp.solve([0] * m + [1], A_ub=A_ub, b_ub=b_ub,
                   A_eq=[[1] * m + [0]], b_eq=[1])
    if res.status != lp.OPTIMAL:
        return None
    return res.value


def _satisfies(v: Valuation, constraints) -> bool:
    return all(measure(v, pred) > p for pred, p in constraints)


def threshold_feasible(F, constraints: Sequence[Constraint], polarity: str) -> bool:
    """``exists``: some ``mu`` in ``conv F`` has ``mu(U_k) > p_k`` for all k.
    ``forall``: every ``mu`` in ``conv F`` does.

    Each ``mu(U)`` is linear, so ``forall`` only needs the generators.
    """
    gens = _as_list(F)
    if polarity == "forall":
        return all(_satisfies(g, constraints) for g in gens)
    if polarity != "exists":
        raise ValueError(f"unknown polarity {polarity!r}")
    if any(_satisfies(g, constraints) for g in gens):
        return True
    eps = exists_slack(gens, constraints)
    return eps is not None and eps > 0


def same_hull(F, G) -> bool:
    """``conv F == conv G``, by mutual membership of extreme points."""
    ef, eg = prune_extreme(F), prune_extreme(G)
    return all(conv_member(v, eg) for v in ef) and all(conv_member(v, ef) for v in eg)


# --------------------------------------------------------------------------
# The approximant recursion
# --------------------------------------------------------------------------


@dataclass
class LevelStats:
    raw: int
    pruned: int


def _deadline_from_env() -> float | None:
    ms = os.environ.get("PGCLC_TIME_MS")
    if not ms:
        return None
    return time.monotonic() + int(ms) / 1000


@dataclass
class Engine:
    """Memoised evaluator of generating sets for one backend.

    ``prune`` removes non-extreme points after every level (and inside the
    Minkowski products once they grow past ``prune_threshold``); the convex
    hull, and so every query, is unchanged.
    """

    backend: Backend
    prune: bool = True
    max_genset: int = 200_000
    max_states: int | None = None  # cap on distinct (config, depth) entries explored
    deadline: float | None = None
    prune_threshold: int = 64
    memo: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.deadline is None:
            self.deadline = _deadline_from_env()

    def _tick(self, n: int):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded("wall-time cap exceeded", depth=n)

    def gen_set(self, c: Config, n: int) -> GenSet:
        if n == 0:
            return BOTTOM_SET
        key = (c, n)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self._tick(n)
        if self.max_states is not None and len(self.memo) >= self.max_states:
            raise BudgetExceeded(f"explored more than {self.max_states} configurations", depth=n)
        members = set()
        for nu in step(c, self.backend):
            halted = {}
            resumes = []
            for k, w in nu.items():
                if isinstance(k, Halt):
                    halted[k.state] = w
                else:
                    resumes.append((w, Config(k.program, k.state)))
            partial = {Valuation(halted)}
            for w, sub_c in resumes:
                sub = self.gen_set(sub_c, n - 1)
                scaled = [scale(w, mu) for mu in sub]
                partial = {add(v, mu) for v in partial for mu in scaled}
                if len(partial) > self.max_genset:
                    raise BudgetExceeded(
                        f"generating set exceeds {self.max_genset} members", depth=n)
                if self.prune and len(partial) > self.prune_threshold:
                    partial = set(prune_extreme(partial))
            members |= partial
            if len(members) > self.max_genset:
                raise BudgetExceeded(
                    f"generating set exceeds {self.max_genset} members", depth=n)
        raw = len(members)
        result = prune_extreme(members) if self.prune else GenSet(members)
        self.stats[key] = LevelStats(raw, len(result))
        self.memo[key] = result
        return result


def gen_set(c: Config, n: int, backend: Backend, prune: bool = True) -> GenSet:
    """Generating set of the depth-``n`` approximant at ``c`` (fresh memo)."""
    return Engine(backend, prune=prune).gen_set(c, n)


__all__ = [
    "GenSet", "BOTTOM_SET", "Engine", "gen_set", "conv_member", "prune_extreme",
    "order_leq", "threshold_feasible", "exists_slack", "same_hull",
    "normalize_mode", "LOWER", "UPPER", "BICONVEX", "Resume",
]
