import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from pgclc import lp


def test_simple_optimum():
    # max x + y st x + 2y <= 4, 3x + y <= 6
    res = lp.solve([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert res.status == lp.OPTIMAL
    assert res.value == Fraction(14, 5)
    assert res.x == (Fraction(8, 5), Fraction(6, 5))


def test_infeasible():
    res = lp.solve([0], A_eq=[[1]], b_eq=[2], A_ub=[[1]], b_ub=[1])
    assert res.status == lp.INFEASIBLE and not res.feasible


def test_unbounded():
    assert lp.solve([1, 0], A_ub=[[-1, 1]], b_ub=[0]).status == lp.UNBOUNDED


def test_redundant_equalities():
    x = lp.feasible(2, A_eq=[[1, 1], [2, 2]], b_eq=[1, 2])
    assert x is not None and sum(x) == 1


def test_negative_rhs():
    res = lp.solve([-1], A_ub=[[-1]], b_ub=[-3])
    assert res.value == -3


def test_degenerate_cycle_candidate():
    # classic Beale example cycles under the largest-coefficient rule
    c = [Fraction(3, 4), -150, Fraction(1, 50), -6]
    A = [[Fraction(1, 4), -60, Fraction(-1, 25), 9],
         [Fraction(1, 2), -90, Fraction(-1, 50), 3],
         [0, 0, 1, 0]]
    res = lp.solve(c, A_ub=A, b_ub=[0, 0, 1])
    assert res.value == Fraction(1, 20)


@pytest.mark.parametrize("seed", range(40))
def test_matches_scipy(seed):
    rng = random.Random(seed)
    n, m_ub, m_eq = rng.randint(1, 5), rng.randint(0, 4), rng.randint(0, 2)
    q = lambda: Fraction(rng.randint(-6, 6), rng.randint(1, 4))  # noqa: E731
    c = [q() for _ in range(n)]
    A_ub = [[q() for _ in range(n)] for _ in range(m_ub)]
    b_ub = [q() + 2 for _ in range(m_ub)]
    A_eq = [[abs(q()) for _ in range(n)] for _ in range(m_eq)]
    b_eq = [abs(q()) + 1 for _ in range(m_eq)]
    # keep it bounded
    A_ub.append([1] * n)
    b_ub.append(10)
    ours = lp.solve(c, A_ub, b_ub, A_eq, b_eq)
    f = lambda rows: np.array([[float(v) for v in r] for r in rows]) if rows else None  # noqa: E731
    ref = linprog([-float(v) for v in c], A_ub=f(A_ub), b_ub=[float(v) for v in b_ub],
                  A_eq=f(A_eq), b_eq=[float(v) for v in b_eq] or None,
                  bounds=[(0, None)] * n, method="highs")
    if ref.status == 2:
        assert ours.status == lp.INFEASIBLE
    else:
        assert ref.status == 0
        assert ours.status == lp.OPTIMAL
        assert abs(float(ours.value) + ref.fun) < 1e-7
        xs = ours.x
        for row, b in zip(A_ub, b_ub):
            assert sum(Fraction(a) * x for a, x in zip(row, xs)) <= b
        for row, b in zip(A_eq, b_eq):
            assert sum(Fraction(a) * x for a, x in zip(row, xs)) == b


def test_fraction_fallback(monkeypatch):
    monkeypatch.setattr(lp, "Q", Fraction)
    monkeypatch.setattr(lp, "ZERO", Fraction(0))
    monkeypatch.setattr(lp, "ONE", Fraction(1))
    res = lp.solve([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert res.value == Fraction(14, 5) and all(type(v) is Fraction for v in res.x)
    assert lp.feasible(1, A_eq=[[1]], b_eq=[2], A_ub=[[1]], b_ub=[1]) is None
