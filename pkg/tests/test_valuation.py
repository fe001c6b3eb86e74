from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pgclc.classical import Store
from pgclc.errors import SemanticsError
from pgclc.valuation import BOTTOM, Valuation, add, combine, leq, measure, scale

F = Fraction


def s(i):
    return Store(("x",), (i,))


s0, s1, s2 = s(0), s(1), s(2)

small = st.fractions(min_value=0, max_value=F(1, 8), max_denominator=16)
ratio = st.fractions(min_value=0, max_value=1, max_denominator=16)


@st.composite
def valuations(draw):
    weights = draw(st.lists(small, min_size=0, max_size=4))
    return Valuation({s(i): w for i, w in enumerate(weights)})


def test_zero_weights_dropped():
    v = Valuation({s0: F(1, 2), s1: 0})
    assert v.support() == {s0} and len(v) == 1


def test_bottom_is_empty():
    assert BOTTOM.is_bottom and BOTTOM.mass == 0 and Valuation() == BOTTOM


def test_rejects_negative_and_overweight():
    with pytest.raises(SemanticsError):
        Valuation({s0: F(-1, 2)})
    with pytest.raises(SemanticsError):
        Valuation({s0: F(2, 3), s1: F(1, 2)})


def test_scale_examples():
    v = Valuation({s0: F(1, 3), s1: F(1, 3)})
    assert scale(0, v) == BOTTOM
    assert scale(1, v) == v
    assert scale(F(1, 2), Valuation.point(s0)) == Valuation({s0: F(1, 2)})


def test_add_examples():
    v = Valuation({s0: F(1, 2)})
    assert add(BOTTOM, v) == v
    assert add(Valuation({s0: F(1, 2)}), Valuation({s1: F(1, 2)})) == Valuation({s0: F(1, 2), s1: F(1, 2)})
    assert add(Valuation({s0: F(1, 4)}), Valuation({s0: F(1, 4)})) == Valuation({s0: F(1, 2)})


def test_leq_examples():
    assert leq(BOTTOM, Valuation.point(s0))
    assert not leq(Valuation({s0: F(1, 2)}), Valuation({s0: F(1, 3)}))
    assert leq(Valuation({s0: F(1, 3)}), Valuation({s0: F(1, 3), s1: F(1, 3)}))


def test_measure_examples():
    assert measure(BOTTOM, lambda _: True) == 0
    assert measure(Valuation.point(s0), lambda k: k == s0) == 1
    assert measure(Valuation({s0: F(1, 3), s1: F(1, 2)}), {s1}) == F(1, 2)


def test_combine_merges():
    v = combine([(F(1, 2), Valuation.point(s0)), (F(1, 2), Valuation.point(s0))])
    assert v == Valuation.point(s0)


def test_hash_agrees_with_equality():
    a = Valuation([(s0, F(1, 4)), (s1, F(1, 4)), (s0, F(1, 4))])
    b = Valuation({s1: F(1, 4), s0: F(1, 2)})
    assert a == b and hash(a) == hash(b) and len({a, b}) == 1


@given(valuations(), valuations(), ratio)
def test_scale_distributes(v, w, r):
    assert scale(r, add(v, w)) == add(scale(r, v), scale(r, w))


@given(valuations(), ratio, ratio)
def test_scale_composes(v, r, q):
    assert scale(r, scale(q, v)) == scale(r * q, v)


@given(valuations(), valuations(), ratio)
def test_measure_linear(v, w, r):
    U = {s0, s2}
    assert measure(add(v, w), U) == measure(v, U) + measure(w, U)
    assert measure(scale(r, v), U) == r * measure(v, U)


@given(valuations(), valuations(), valuations())
def test_leq_partial_order(u, v, w):
    assert leq(u, u)
    if leq(u, v) and leq(v, u):
        assert u == v
    if leq(u, v) and leq(v, w):
        assert leq(u, w)


@given(valuations(), valuations())
def test_leq_under_addition(v, w):
    assert leq(v, add(v, w))
