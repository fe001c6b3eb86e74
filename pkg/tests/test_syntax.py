from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgclc.errors import ParseError
from pgclc.syntax import (Assign, BitTest, Cmp, Const, Gate, Header, Measure, NChoice, Not,
                          Par, PChoice, RandAssign, Reset, Seq, Skip, Var, While, parse_condition,
                          parse_program, parse_source, pretty_print, pretty_print_source)

from strategies import CLASSICAL, QUANTUM, classical_programs, quantum_programs

XY = Header.classical("x", "y", "a", "b", "c")


def a(name):
    return Assign(name, Const(0))


def test_skip():
    assert parse_program("skip") == Skip()


def test_par_of_assignments():
    assert parse_program("x := 0 || x := 1", XY) == Par(Assign("x", Const(0)), Assign("x", Const(1)))


def test_seq_binds_tighter_than_choice():
    p = parse_program("a := 0; b := 0 + c := 0", XY)
    assert p == NChoice(Seq(a("a"), a("b")), a("c"))


def test_precedence_ladder():
    p = parse_program("a := 0; b := 0 || c := 0 +[1/3] skip", XY)
    assert p == PChoice(Fraction(1, 3), Par(Seq(a("a"), a("b")), a("c")), Skip())


def test_left_associative():
    p = parse_program("skip + skip + x := 0", XY)
    assert p == NChoice(NChoice(Skip(), Skip()), a("x"))


def test_print_examples():
    assert pretty_print(Skip()) == "skip"
    assert pretty_print(PChoice(Fraction(1, 2), Skip(), Skip())) == "skip +[1/2] skip"
    assert pretty_print(Par(Skip(), Skip())) == "skip || skip"


def test_decimal_probability_is_exact():
    p = parse_program("skip +[0.25] skip")
    assert p.prob == Fraction(1, 4)


def test_coin_sugar():
    p = parse_program("x :~ coin(1/3)", XY)
    assert p == RandAssign("x", ((Fraction(1, 3), Const(1)), (Fraction(2, 3), Const(0))))


def test_header_scopes_conditions():
    src = parse_source("var x;\nwhile x = 0 { x :~ {1/2: 0, 1/2: 1} }")
    assert src.header == Header.classical("x")
    assert isinstance(src.program, While)
    with pytest.raises(ParseError, match="unknown variable"):
        parse_source("var x;\ny := 1")


def test_quantum_atomics():
    src = parse_source("bits 1 qubits 2;\nH(q1); CNOT(q1, q2); M[x1 <- q2] || q1 <- |0>")
    assert src.header == Header.quantum(1, 2)
    assert src.program == Par(
        Seq(Seq(Gate("H", (1,)), Gate("CNOT", (1, 2))), Measure(1, 2)), Reset(1))


def test_bit_conditions():
    c = parse_condition("x1 != 1", QUANTUM)
    assert c == Not(BitTest(1, 1))


def test_comparison_with_parenthesised_operand():
    c = parse_condition("(x + 1) * 2 < y", CLASSICAL)
    assert isinstance(c, Cmp) and c.op == "<"


@pytest.mark.parametrize("text", [
    "skip +[3/2] skip",       # probability above 1
    "skip +[1/0] skip",
    "x :~ {1/2: 0, 1/3: 1}",  # weights do not sum to 1
    "x := ",
    "while x = 0 skip",
    "H(q1, q1)",
    "FOO(q1)",
    "skip ;; skip",
])
def test_errors_are_located(text):
    head = "bits 1 qubits 2;\n" if "q1" in text else "var x;\n"
    with pytest.raises(ParseError) as info:
        parse_source(head + text)
    span = info.value.span
    assert span is not None and 0 <= span.start <= span.end <= len((head + text).encode())


def test_span_is_in_bytes():
    text = "var x; # héllo\nx := $"
    with pytest.raises(ParseError) as info:
        parse_source(text)
    start = info.value.span.start
    assert text.encode()[start:start + 1] == b"$"


def test_invalid_utf8():
    with pytest.raises(ParseError):
        parse_source(b"var x;\nx := \xff")


@settings(max_examples=300, deadline=None)
@given(classical_programs)
def test_round_trip_classical(p):
    text = pretty_print(p)
    assert parse_program(text, CLASSICAL) == p, text


@settings(max_examples=200, deadline=None)
@given(quantum_programs)
def test_round_trip_quantum(p):
    text = pretty_print(p)
    assert parse_program(text, QUANTUM) == p, text


@settings(max_examples=100, deadline=None)
@given(classical_programs)
def test_source_round_trip(p):
    from pgclc.syntax import Source

    src = Source(CLASSICAL, p)
    assert parse_source(pretty_print_source(src)) == src


@settings(max_examples=500, deadline=None)
@given(st.binary(max_size=64))
def test_parser_total_on_bytes(data):
    try:
        parse_source(data)
    except ParseError as e:
        assert e.span is None or e.span.end <= len(data) + 1


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet="xyz01 :=;|+[]/(){}<>!&~-*skipwhlent", max_size=40))
def test_parser_total_on_near_programs(text):
    try:
        parse_program(text, CLASSICAL)
    except ParseError:
        pass
