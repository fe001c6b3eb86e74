from fractions import Fraction

import pytest

from pgclc.classical import ClassicalBackend
from pgclc.smallstep import RULES, Config, reachable_states, step, trace_lines
from pgclc.syntax import Header, NChoice, PChoice, Seq, Skip, While, TRUE, parse_program
from pgclc.valuation import Halt, Resume, Valuation

from corpus import make_corpus

B = ClassicalBackend(("x", "y"))
H = Header.classical("x", "y")
s = B.initial_state({"x": 5})


def cfg(text, state=s):
    return Config(parse_program(text, H), state)


def halt(**kw):
    return Valuation.point(Halt(B.initial_state(kw)))


def test_skip():
    assert step(cfg("skip"), B) == (Valuation.point(Halt(s)),)


def test_nchoice_of_assignments():
    assert set(step(cfg("x := 0 + x := 1"), B)) == {halt(x=0), halt(x=1)}


def test_par_resumes_other_side():
    out = set(step(cfg("x := 0 || x := 1"), B))
    assert out == {
        Valuation.point(Resume(parse_program("x := 1", H), B.initial_state({"x": 0}))),
        Valuation.point(Resume(parse_program("x := 0", H), B.initial_state({"x": 1}))),
    }


def test_while_unfolds():
    loop = While(TRUE, Skip())
    assert step(Config(loop, s), B) == (Valuation.point(Resume(Seq(Skip(), loop), s)),)


def test_while_false_halts():
    assert step(cfg("while x = 0 { skip }"), B) == (Valuation.point(Halt(s)),)


def test_if_resumes_branch():
    (mu,) = step(cfg("if x = 5 then { y := 1 } else { skip }"), B)
    assert mu == Valuation.point(Resume(parse_program("y := 1", H), s))


def test_seq_threads_continuation():
    (mu,) = step(cfg("x :~ {1/2: 0, 1/2: 1}; y := x"), B)
    rest = parse_program("y := x", H)
    assert mu == Valuation({Resume(rest, B.initial_state({"x": 0})): Fraction(1, 2),
                            Resume(rest, B.initial_state({"x": 1})): Fraction(1, 2)})


def test_pchoice_mixes_every_pair():
    out = step(cfg("(x := 0 + x := 1) +[1/3] (y := 0 + y := 1)"), B)
    assert len(out) == 4
    a = Halt(B.initial_state({"x": 0}))
    b = Halt(B.initial_state({"x": 5, "y": 1}))
    assert Valuation({a: Fraction(1, 3), b: Fraction(2, 3)}) in out


def test_pchoice_degenerate_probabilities_keep_both_premises():
    # with p = 1 the right operand contributes nothing, yet both premises are derived
    trace = set()
    out = step(cfg("skip +[1] (x := 0 + x := 1)"), B, trace=trace)
    assert out == (Valuation.point(Halt(s)),)
    assert {"nchoice-left", "nchoice-right"} <= trace


def test_pchoice_of_equal_branches_merges():
    assert step(cfg("skip +[1/2] skip"), B) == (Valuation.point(Halt(s)),)


def test_identical_transitions_deduplicated():
    assert len(step(cfg("x := 1 + x := 1"), B)) == 1


def test_reachable_states():
    c = cfg("x :~ {1/2: 0, 1/2: 1}")
    assert reachable_states(c, B, 0) == {s}
    assert reachable_states(c, B, 1) == {s, B.initial_state({"x": 0}), B.initial_state({"x": 1})}
    loop = cfg("while true { skip }")
    assert reachable_states(loop, B, 7) == {s}


def test_trace_lines():
    lines = trace_lines(cfg("x := 0 + x := 1"), B)
    assert lines == ["<x := 0 + x := 1 | {x=5, y=0}> --> 1*{x=0, y=0}",
                     "<x := 0 + x := 1 | {x=5, y=0}> --> 1*{x=1, y=0}"]


def _configs(c, backend, depth):
    seen, frontier = {c}, [c]
    for _ in range(depth):
        nxt = []
        for cc in frontier:
            for mu in step(cc, backend):
                for k in mu:
                    if isinstance(k, Resume):
                        r = Config(k.program, k.state)
                        if r not in seen:
                            seen.add(r)
                            nxt.append(r)
        frontier = nxt
    return seen


backend, CORPUS = make_corpus()
CAP = 64


@pytest.mark.parametrize("i", range(len(CORPUS)))
def test_corpus_invariants(i):
    _, c = CORPUS[i]
    for cc in _configs(c, backend, 4):
        out = step(cc, backend)
        assert 1 <= len(out) <= CAP
        assert all(mu.mass == 1 for mu in out)
        p = cc.program
        if isinstance(p, (PChoice, NChoice)):
            nl = len(step(Config(p.left, cc.state), backend))
            nr = len(step(Config(p.right, cc.state), backend))
            bound = nl * nr if isinstance(p, PChoice) else nl + nr
            assert len(out) <= bound


def test_rule_coverage():
    used = set()
    for _, c in CORPUS:
        for cc in _configs(c, backend, 4):
            step(cc, backend, trace=used)
    assert used == set(RULES), set(RULES) - used
