"""Finite-support subprobability valuations with exact rational weights.

A :class:`Valuation` maps keys (backend states, or :class:`Halt` /
:class:`Resume` outcomes of a small step) to positive :class:`Fraction`
weights.  Zero weights are never stored, so two valuations are equal as
Python objects exactly when they are equal as functions.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import SemanticsError

ZERO = Fraction(0)
ONE = Fraction(1)


class Halt(NamedTuple):
    """Outcome of a step that terminated in ``state``."""

    state: object


class Resume(NamedTuple):
    """Outcome of a step that continues as ``program`` from ``state``."""

    program: object
    state: object


def key_order(key) -> tuple:
    """Total order on valuation keys, used only for deterministic output."""
    if isinstance(key, Resume):
        from .syntax import pretty_print

        return (2, pretty_print(key.program), key.state.sort_key())
    if isinstance(key, Halt):
        return (1, "", key.state.sort_key())
    return (0, "", key.sort_key())


class Valuation:
    """Immutable map key -> positive rational with total mass at most 1."""

    __slots__ = ("_w", "_hash", "_mass")

    def __init__(self, weights: Mapping | Iterable = ()):
        w = {}
        items = weights.items() if isinstance(weights, Mapping) else weights
        for k, v in items:
            v = Fraction(v)
            if v < 0:
                raise SemanticsError(f"negative weight {v} for {k!r}")
            if v:
                w[k] = w.get(k, ZERO) + v
        self._init(w)

    def _init(self, w: dict):
        self._w = w
        self._hash = None
        self._mass = sum(w.values(), ZERO)
        if self._mass > 1:
            raise SemanticsError(f"valuation mass {self._mass} exceeds 1")

    @classmethod
    def _trusted(cls, w: dict) -> "Valuation":
        v = cls.__new__(cls)
        v._init(w)
        return v

    @classmethod
    def point(cls, key, weight=ONE) -> "Valuation":
        """The Dirac valuation ``weight * delta_key``."""
        return cls({key: weight})

    # -- mapping protocol -------------------------------------------------

    def __getitem__(self, key) -> Fraction:
        return self._w.get(key, ZERO)

    def __contains__(self, key) -> bool:
        return key in self._w

    def __iter__(self):
        return iter(self._w)

    def __len__(self) -> int:
        return len(self._w)

    def items(self):
        return self._w.items()

    def support(self) -> frozenset:
        return frozenset(self._w)

    @property
    def mass(self) -> Fraction:
        return self._mass

    def is_bottom(self) -> bool:
        return not self._w

    def __eq__(self, other):
        if not isinstance(other, Valuation):
            return NotImplemented
        return self._w == other._w

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._w.items()))
        return self._hash

    def sorted_items(self) -> list:
        return sorted(self._w.items(), key=lambda kv: key_order(kv[0]))

    def sort_key(self) -> tuple:
        return tuple((key_order(k), w) for k, w in self.sorted_items())

    def __repr__(self):
        if not self._w:
            return "Valuation(⊥)"
        body = ", ".join(f"{k!r}: {w}" for k, w in self.sorted_items())
        return f"Valuation({{{body}}})"

    # -- cone operations --------------------------------------------------

    def scale(self, r) -> "Valuation":
        return scale(r, self)

    def __add__(self, other: "Valuation") -> "Valuation":
        return add(self, other)

    def __le__(self, other: "Valuation") -> bool:
        return leq(self, other)

    def map_keys(self, f: Callable) -> "Valuation":
        """Push forward along ``f``; colliding images add up."""
        w = {}
        for k, v in self._w.items():
            fk = f(k)
            w[fk] = w.get(fk, ZERO) + v
        return Valuation._trusted(w)

    def to_json(self, key_json: Callable) -> list:
        return [{"state": key_json(k), "weight": _fmt(w)}
                for k, w in self.sorted_items()]


BOTTOM = Valuation()


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def scale(r, v: Valuation) -> Valuation:
    """``r * v`` pointwise; raises :class:`SemanticsError` if the mass exceeds 1."""
    r = Fraction(r)
    if r < 0:
        raise SemanticsError(f"negative scalar {r}")
    if r == 0 or not v._w:
        return BOTTOM
    if r == 1:
        return v
    return Valuation._trusted({k: r * w for k, w in v._w.items()})


def add(v: Valuation, w: Valuation) -> Valuation:
    """Pointwise sum; raises :class:`SemanticsError` if the mass exceeds 1."""
    if not v._w:
        return w
    if not w._w:
        return v
    out = dict(v._w)
    for k, x in w._w.items():
        out[k] = out.get(k, ZERO) + x
    return Valuation._trusted(out)


def combine(terms: Iterable[tuple]) -> Valuation:
    """``sum_i r_i * v_i`` for ``(r_i, v_i)`` pairs, checked once at the end."""
    out = {}
    for r, v in terms:
        r = Fraction(r)
        if r < 0:
            raise SemanticsError(f"negative scalar {r}")
        if not r:
            continue
        for k, x in v._w.items():
            out[k] = out.get(k, ZERO) + r * x
    return Valuation._trusted(out)


def leq(v: Valuation, w: Valuation) -> bool:
    """Pointwise order: ``v(s) <= w(s)`` for every key ``s``."""
    return all(x <= w._w.get(k, ZERO) for k, x in v._w.items())


def measure(v: Valuation, pred: Callable | Iterable) -> Fraction:
    """Total weight of the keys satisfying ``pred`` (a predicate or a key set)."""
    if not callable(pred):
        keys = frozenset(pred)
        pred = keys.__contains__
    return sum((x for k, x in v._w.items() if pred(k)), ZERO)
