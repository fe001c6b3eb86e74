import json
import math
from fractions import Fraction

import numpy as np
import pytest

from pgclc.errors import BackendError
from pgclc.quantum import (EPS_KEY, CQState, GateSpec, QuantumBackend, canonical_key, load_gates,
                           rationalize)
from pgclc.syntax import Gate, Measure, Reset
from pgclc.valuation import Valuation

R2 = 1 / math.sqrt(2)
HALF = Fraction(1, 2)


def qb(bits=1, qubits=1):
    return QuantumBackend(bits, qubits)


def branches(v: Valuation):
    return sorted(((w, st.bits, st.amps) for st, w in v.items()), key=lambda t: t[1])


def test_x_on_zero():
    B = qb(0, 1)
    out = B.interp_gate(Gate("X", (1,)), B.initial_state())
    assert out == Valuation.point(B.make_state((), [0, 1]))


def test_identity_gate():
    B = qb(0, 2)
    s = B.make_state((), [0.6, 0, 0, 0.8j])
    assert B.interp_gate(Gate("I", (2,)), s) == Valuation.point(s)


def test_hadamard():
    B = qb(0, 1)
    out = B.interp_gate(Gate("H", (1,)), B.initial_state())
    assert out == Valuation.point(B.make_state((), [R2, R2]))


def test_measure_basis_state():
    B = qb(1, 1)
    s = B.initial_state({"x1": 1})
    (w, bits, amps), = branches(B.interp_measure(Measure(1, 1), s))
    assert w == 1 and bits == (0,) and np.allclose(amps, [1, 0])


def test_measure_plus_state():
    B = qb(1, 1)
    out = branches(B.interp_measure(Measure(1, 1), B.make_state((0,), [R2, R2])))
    assert [(w, bits) for w, bits, _ in out] == [(HALF, (0,)), (HALF, (1,))]
    assert np.allclose(out[0][2], [1, 0]) and np.allclose(out[1][2], [0, 1])


def test_measure_bell_first_qubit():
    B = qb(1, 2)
    out = branches(B.interp_measure(Measure(1, 1), B.make_state((0,), [R2, 0, 0, R2])))
    assert [(w, bits) for w, bits, _ in out] == [(HALF, (0,)), (HALF, (1,))]
    assert np.allclose(out[0][2], [1, 0, 0, 0]) and np.allclose(out[1][2], [0, 0, 0, 1])


def test_reset_examples():
    B = qb(0, 1)
    zero = B.initial_state()
    assert B.interp_reset(Reset(1), B.make_state((), [0, 1])) == Valuation.point(zero)
    assert B.interp_reset(Reset(1), zero) == Valuation.point(zero)


def test_reset_bell_first_qubit():
    B = qb(0, 2)
    out = B.interp_reset(Reset(1), B.make_state((), [R2, 0, 0, R2]))
    assert out == Valuation({B.make_state((), [1, 0, 0, 0]): HALF,
                             B.make_state((), [0, 1, 0, 0]): HALF})


def test_canonical_key():
    s = CQState((), [1, 0])
    assert s.key[0] == "" and s.key[1] == (round(1 / EPS_KEY), 0, 0, 0)
    assert canonical_key(CQState((), np.exp(0.7j) * np.array([1, 0]))) == canonical_key(s)
    t = CQState((), [math.sqrt(1 - (0.6 + 10 * EPS_KEY) ** 2), 0.6 + 10 * EPS_KEY])
    u = CQState((), [0.8, 0.6])
    assert canonical_key(t) != canonical_key(u)


def test_rationalize(caplog):
    assert rationalize(0.5) == HALF
    p = math.cos(math.pi / 8) ** 2
    q = rationalize(p)
    assert q.denominator <= 2 ** 20 and abs(float(q) - p) <= 1e-9
    with caplog.at_level("WARNING"):
        assert rationalize(p, max_den=16, eps=1e-12) == Fraction(p)
    assert "exact float" in caplog.text


def test_non_dyadic_weights_stay_exact_sum():
    B = qb(1, 1)
    s = B.make_state((0,), [math.cos(0.3), math.sin(0.3)])
    v = B.interp_measure(Measure(1, 1), s)
    assert v.mass == 1


def test_non_unitary_rejected(tmp_path):
    with pytest.raises(BackendError):
        GateSpec("BAD", np.array([[1, 1], [0, 1]]))
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"name": "SX", "size": 2,
                                "matrix": [[0.5, 0.5], [0.5, -0.5], [0.5, -0.5], [0.5, 0.5]]}))
    g = load_gates(path)["SX"]
    assert g.arity == 1
    path.write_text(json.dumps({"name": "B", "size": 2, "matrix": [[1, 0], [1, 0], [0, 0], [1, 0]]}))
    with pytest.raises(BackendError):
        load_gates(path)


def test_gate_arity_checked():
    B = qb(0, 2)
    with pytest.raises(BackendError):
        B.interp_gate(Gate("CNOT", (1,)), B.initial_state())


# -- density-operator oracles ---------------------------------------------


def random_state(rng, n):
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)


def density(v: Valuation) -> np.ndarray:
    return sum(float(w) * np.outer(st.amps, st.amps.conj()) for st, w in v.items())


def reset_channel(psi: np.ndarray, i: int) -> np.ndarray:
    """|0><0| on qubit i tensored with the partial trace over qubit i, by index algebra."""
    n = int(math.log2(psi.size))
    rho = np.outer(psi, psi.conj()).reshape((2,) * (2 * n))
    reduced = np.trace(rho, axis1=i, axis2=n + i)  # remaining axes: n-1 row, n-1 col
    zero = np.array([[1, 0], [0, 0]], dtype=complex)
    full = np.multiply.outer(zero, reduced)  # axes: r_i, c_i, rows..., cols...
    rows = list(range(2, 2 + n - 1))
    cols = list(range(2 + n - 1, 2 + 2 * (n - 1)))
    order = rows[:i] + [0] + rows[i:] + cols[:i] + [1] + cols[i:]
    return full.transpose(order).reshape(2 ** n, 2 ** n)


def test_reset_matches_partial_trace():
    rng = np.random.default_rng(1)
    B = qb(0, 3)
    for _ in range(30):
        psi = random_state(rng, 3)
        for q in (1, 2, 3):
            out = B.interp_reset(Reset(q), B.make_state((), psi))
            assert out.mass == 1
            assert np.allclose(density(out), reset_channel(psi, q - 1), atol=1e-9, rtol=0)


def test_reset_equals_measure_then_flip():
    rng = np.random.default_rng(2)
    B = qb(1, 3)
    for _ in range(30):
        psi = random_state(rng, 3)
        q = int(rng.integers(1, 4))
        s = B.make_state((0,), psi)
        measured = B.interp_measure(Measure(1, q), s)
        terms = []
        for st, w in measured.items():
            if st.bits[0] == 1:
                (st,) = B.interp_gate(Gate("X", (q,)), st).support()
            terms.append((st, w))
        flipped = Valuation(terms)
        reset = B.interp_reset(Reset(q), s)
        assert np.allclose(density(flipped), density(reset), atol=1e-9, rtol=0)


def test_unitarity_over_random_circuits():
    rng = np.random.default_rng(3)
    B = qb(0, 3)
    names1 = ["I", "X", "Y", "Z", "H", "S", "T"]
    names2 = ["CNOT", "CZ", "SWAP"]
    for _ in range(5):
        s = B.make_state((), random_state(rng, 3))
        for _ in range(50):
            if rng.random() < 0.6:
                g = Gate(str(rng.choice(names1)), (int(rng.integers(1, 4)),))
            else:
                a, b = rng.choice([1, 2, 3], size=2, replace=False)
                g = Gate(str(rng.choice(names2)), (int(a), int(b)))
            (s,) = B.interp_gate(g, s).support()
            assert abs(np.linalg.norm(s.amps) - 1) < 1e-9
