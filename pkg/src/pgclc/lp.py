"""Exact rational linear programming (two-phase tableau simplex, Bland's rule).

Solves ``maximize c.x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``x >= 0``, with every coefficient an exact rational.  Bland's rule
guarantees termination; problem sizes here are small, so the dense tableau is
fine, but pivots skip zero entries.

The tableau uses ``gmpy2.mpq`` when gmpy2 is installed (several times faster
than :class:`Fraction`); inputs and results are plain Fractions either way.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

try:
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Fraction | None = None
    x: tuple | None = None

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


def _q(v):
    if isinstance(v, Fraction):
        return Q(v.numerator, v.denominator)
    return Q(v)


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _pivot(rows: list, obj: list, r: int, j: int):
    prow = rows[r]
    piv = prow[j]
    if piv != 1:
        inv = ONE / piv
        for t in range(len(prow)):
            if prow[t]:
                prow[t] *= inv
    nz = [t for t in range(len(prow)) if prow[t]]
    for i, row in enumerate(rows):
        if i == r:
            continue
        f = row[j]
        if f:
            for t in nz:
                row[t] -= f * prow[t]
    f = obj[j]
    if f:
        for t in nz:
            obj[t] -= f * prow[t]


def _run(rows: list, basis: list, obj: list, allowed: int) -> str:
    """Maximise with reduced-cost row ``obj``; columns ``>= allowed`` never enter."""
    while True:
        enter = next((j for j in range(allowed) if obj[j] > 0), None)
        if enter is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return UNBOUNDED
        r = best[1]
        _pivot(rows, obj, r, enter)
        basis[r] = enter


def solve(c: Sequence, A_ub: Sequence = (), b_ub: Sequence = (),
          A_eq: Sequence = (), b_eq: Sequence = ()) -> LPResult:
    """Maximise ``c.x`` over ``{x >= 0 : A_ub x <= b_ub, A_eq x = b_eq}``."""
    n = len(c)
    m_ub, m_eq = len(A_ub), len(A_eq)
    m = m_ub + m_eq
    # columns: originals | slacks (one per ub row) | artificials (one per row)
    n_slack = m_ub
    art0 = n + n_slack
    width = art0 + m + 1
    rows = []
    basis = []
    for i in range(m):
        row = [ZERO] * width
        if i < m_ub:
            coeffs, rhs = A_ub[i], _q(b_ub[i])
            row[n + i] = ONE
        else:
            coeffs, rhs = A_eq[i - m_ub], _q(b_eq[i - m_ub])
        for j, a in enumerate(coeffs):
            if a:
                row[j] = _q(a)
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        row[-1] = rhs
        if i < m_ub and row[n + i] == 1:
            basis.append(n + i)
        else:
            row[art0 + i] = ONE
            basis.append(art0 + i)
        rows.append(row)

    # phase I: maximise -(sum of artificials)
    obj = [ZERO] * width
    for i, b in enumerate(basis):
        if b >= art0:
            obj[b] = -ONE
    for i, b in enumerate(basis):
        if b >= art0:
            for t, v in enumerate(rows[i]):
                if v:
                    obj[t] += v
            obj[b] = ZERO
    if any(b >= art0 for b in basis):
        _run(rows, basis, obj, art0)
        if obj[-1] != 0:
            return LPResult(INFEASIBLE)
        # drive zero-valued artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(rows):
            if basis[i] >= art0:
                j = next((j for j in range(art0) if rows[i][j]), None)
                if j is None:
                    del rows[i]
                    del basis[i]
                    continue
                _pivot(rows, obj, i, j)
                basis[i] = j
            i += 1

    # phase II
    obj = [ZERO] * width
    for j, v in enumerate(c):
        obj[j] = _q(v)
    for i, b in enumerate(basis):
        cb = obj[b]
        if cb:
            for t, v in enumerate(rows[i]):
                if v:
                    obj[t] -= cb * v
    status = _run(rows, basis, obj, art0)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = [Fraction(0)] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = _frac(rows[i][-1])
    value = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, value, tuple(x))


def feasible(n: int, A_ub: Sequence = (), b_ub: Sequence = (),
             A_eq: Sequence = (), b_eq: Sequence = ()) -> tuple | None:
    """A feasible point of the polyhedron, or ``None`` when it is empty."""
    res = solve([ZERO] * n, A_ub, b_ub, A_eq, b_eq)
    return res.x if res.status == OPTIMAL else None
