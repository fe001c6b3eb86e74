"""Integer-store instantiation of states, atomic programs and conditions."""

from __future__ import annotations

from dataclasses import dataclass

from .backend import Backend
from .errors import BackendError
from .syntax import (And, Assign, BinOp, BitTest, BoolConst, Cmp, Const, Header,
                     Neg, Not, Or, RandAssign, Var)
from .valuation import Valuation


@dataclass(frozen=True, order=True)
class Store:
    """Values of the declared variables, in declaration order."""

    names: tuple
    values: tuple

    def __getitem__(self, name: str) -> int:
        try:
            return self.values[self.names.index(name)]
        except ValueError:
            raise BackendError(f"unknown variable {name!r}") from None

    def set(self, name: str, value: int) -> "Store":
        i = self.names.index(name)
        return Store(self.names, self.values[:i] + (value,) + self.values[i + 1:])

    def sort_key(self) -> tuple:
        return self.values

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values))

    def __repr__(self):
        return "{" + ", ".join(f"{n}={v}" for n, v in zip(self.names, self.values)) + "}"


_CMP = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


class ClassicalBackend(Backend):
    """Stores over arbitrary-precision integers.

    ``int_bound`` optionally rejects any computed value with absolute value
    above the bound.  Division is floor division (Python ``//``).
    """

    def __init__(self, variables=(), int_bound: int | None = None):
        self.variables = tuple(variables)
        self.header = Header.classical(*self.variables)
        self.int_bound = int_bound

    def initial_state(self, assignment: dict | None = None) -> Store:
        assignment = dict(assignment or {})
        unknown = set(assignment) - set(self.variables)
        if unknown:
            raise BackendError(f"unknown variable(s) {sorted(unknown)}")
        return Store(self.variables,
                     tuple(int(assignment.get(v, 0)) for v in self.variables))

    def eval_expr(self, e, s: Store) -> int:
        match e:
            case Const(v):
                return self._check(v)
            case Var(name):
                return s[name]
            case Neg(x):
                return self._check(-self.eval_expr(x, s))
            case BinOp(op, l, r):
                a, b = self.eval_expr(l, s), self.eval_expr(r, s)
                if op == "+":
                    v = a + b
                elif op == "-":
                    v = a - b
                elif op == "*":
                    v = a * b
                else:
                    if b == 0:
                        raise BackendError("division by zero")
                    v = a // b
                return self._check(v)
        raise BackendError(f"not an integer expression: {e!r}")

    def _check(self, v: int) -> int:
        if self.int_bound is not None and abs(v) > self.int_bound:
            raise BackendError(f"integer {v} outside configured bound ±{self.int_bound}")
        return v

    def interp_atomic(self, a, s: Store) -> Valuation:
        if isinstance(a, Assign):
            return Valuation.point(s.set(a.var, self.eval_expr(a.expr, s)))
        if isinstance(a, RandAssign):
            return Valuation((s.set(a.var, self.eval_expr(e, s)), w)
                             for w, e in a.branches)
        raise BackendError(f"not a classical atomic program: {a!r}")

    def interp_cond(self, c, s: Store) -> bool:
        match c:
            case BoolConst(v):
                return v
            case Cmp(op, l, r):
                return _CMP[op](self.eval_expr(l, s), self.eval_expr(r, s))
            case Not(x):
                return not self.interp_cond(x, s)
            case And(l, r):
                return self.interp_cond(l, s) and self.interp_cond(r, s)
            case Or(l, r):
                return self.interp_cond(l, s) or self.interp_cond(r, s)
            case BitTest():
                raise BackendError("bit tests need the quantum backend")
        raise BackendError(f"not a condition: {c!r}")

    def state_json(self, s: Store) -> dict:
        return s.as_dict()

    def format_state(self, s: Store) -> str:
        return repr(s)
