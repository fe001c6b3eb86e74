"""Pure classical-quantum states and the gate / reset / measurement channels.

A state is a classical bit register paired with a pure state vector over
``m`` qubits.  Qubit ``q1`` is the most significant (leftmost) tensor
factor.  Channels whose output is mixed are returned as finite convex
combinations of pure states, using the computational-basis decomposition.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .backend import Backend
from .errors import BackendError
from .syntax import And, BitTest, BoolConst, Gate, Measure, Not, Or, Reset
from .valuation import ONE, Valuation

log = logging.getLogger(__name__)

EPS_NORM = 1e-9
EPS_KEY = 1e-6
EPS_PROB = 1e-9
MAX_DENOMINATOR = 2 ** 20

_S2 = 1 / np.sqrt(2)

GATE_LIBRARY = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "T": np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                     dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                     dtype=complex),
}


@dataclass(frozen=True)
class GateSpec:
    name: str
    matrix: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.matrix, dtype=complex)
        d = u.shape[0]
        if u.ndim != 2 or u.shape != (d, d) or d < 2 or d & (d - 1):
            raise BackendError(f"gate {self.name}: matrix must be 2^k x 2^k, got {u.shape}")
        if not np.allclose(u @ u.conj().T, np.eye(d), rtol=0, atol=EPS_NORM):
            raise BackendError(f"gate {self.name}: matrix is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "matrix", u)

    @property
    def arity(self) -> int:
        return self.matrix.shape[0].bit_length() - 1


def load_gates(path) -> dict:
    """Read custom gates from a JSON sidecar.

    The file holds one object or a list of objects
    ``{"name": ..., "size": ..., "matrix": [[re, im], ...]}`` with the matrix
    in row-major order; ``size`` is the matrix dimension (the qubit count is
    accepted too).
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = [data]
    gates = {}
    for entry in data:
        size = int(entry["size"])
        flat = entry["matrix"]
        if len(flat) == size * size:
            d = size
        elif len(flat) == 4 ** size:
            d = 2 ** size
        else:
            raise BackendError(f"gate {entry['name']}: {len(flat)} entries do not fit size {size}")
        m = np.array([complex(re, im) for re, im in flat]).reshape(d, d)
        gates[entry["name"]] = GateSpec(entry["name"], m)
    return gates


def _grid(amps: np.ndarray, eps: float) -> tuple:
    re = np.rint(amps.real / eps).astype(np.int64)
    im = np.rint(amps.imag / eps).astype(np.int64)
    return tuple(int(v) for pair in zip(re, im) for v in pair)


class CQState:
    """``|x><x| (x) |psi><psi|`` with a phase-normalised ``psi``.

    Equality, hashing and ordering go through :attr:`key`, so states that
    agree up to global phase and the ``EPS_KEY`` grid are identified.
    """

    __slots__ = ("bits", "amps", "key", "_hash")

    def __init__(self, bits, amps, eps_key: float = EPS_KEY):
        amps = np.array(amps, dtype=complex).ravel()
        n = amps.size
        if n == 0 or n & (n - 1):
            raise BackendError(f"amplitude vector length {n} is not a power of 2")
        mags = np.abs(amps)
        lead = np.flatnonzero(mags > eps_key)
        if lead.size == 0:
            raise BackendError("zero state vector")
        a = amps[lead[0]]
        amps = amps * (np.conj(a) / abs(a))
        amps.setflags(write=False)
        self.bits = tuple(int(b) for b in bits)
        self.amps = amps
        self.key = ("".join(map(str, self.bits)), _grid(amps, eps_key))
        self._hash = hash(self.key)

    @property
    def nqubits(self) -> int:
        return self.amps.size.bit_length() - 1

    def __eq__(self, other):
        if not isinstance(other, CQState):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def sort_key(self) -> tuple:
        return self.key

    def tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.nqubits)

    def __repr__(self):
        return f"CQState(bits={self.key[0]!r}, amps={np.round(self.amps, 6).tolist()})"


def rationalize(p: float, max_den: int = MAX_DENOMINATOR, eps: float = EPS_PROB) -> Fraction:
    """Snap a float probability to a nearby small-denominator rational."""
    snapped = Fraction(p).limit_denominator(max_den)
    if abs(float(snapped) - p) <= eps:
        return snapped
    log.warning("probability %r kept as exact float rational", p)
    return Fraction(p)


def apply_unitary(u: np.ndarray, psi: np.ndarray, targets) -> np.ndarray:
    """Apply ``u`` to the (0-based) ``targets`` axes of the tensor ``psi``."""
    k = len(targets)
    ut = u.reshape((2,) * (2 * k))
    out = np.tensordot(ut, psi, axes=(list(range(k, 2 * k)), list(targets)))
    return np.moveaxis(out, list(range(k)), list(targets))


def branch_weights(psi: np.ndarray, axis: int) -> tuple:
    p0 = float(np.sum(np.abs(np.take(psi, 0, axis=axis)) ** 2))
    p1 = float(np.sum(np.abs(np.take(psi, 1, axis=axis)) ** 2))
    return p0, p1


class QuantumBackend(Backend):
    def __init__(self, nbits: int, nqubits: int, gates: dict | None = None,
                 eps_norm: float = EPS_NORM, eps_key: float = EPS_KEY,
                 eps_prob: float = EPS_PROB, max_denominator: int = MAX_DENOMINATOR):
        from .syntax import Header

        self.nbits = nbits
        self.nqubits = nqubits
        self.header = Header.quantum(nbits, nqubits)
        self.gates = {name: GateSpec(name, m) for name, m in GATE_LIBRARY.items()}
        for name, g in (gates or {}).items():
            self.gates[name] = g if isinstance(g, GateSpec) else GateSpec(name, g)
        self.eps_norm = eps_norm
        self.eps_key = eps_key
        self.eps_prob = eps_prob
        self.max_denominator = max_denominator

    @property
    def gate_arity(self) -> dict:
        return {name: g.arity for name, g in self.gates.items()}

    # -- states -----------------------------------------------------------

    def make_state(self, bits, amps) -> CQState:
        amps = np.asarray(amps, dtype=complex).ravel()
        if len(bits) != self.nbits or amps.size != 2 ** self.nqubits:
            raise BackendError("state does not match the declared register sizes")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > self.eps_norm:
            raise BackendError(f"state vector has norm {norm}")
        return CQState(bits, amps, self.eps_key)

    def initial_state(self, assignment: dict | None = None, amps=None) -> CQState:
        bits = [0] * self.nbits
        for name, v in (assignment or {}).items():
            if not (name.startswith("x") and name[1:].isdigit()):
                raise BackendError(f"unknown bit {name!r}")
            i = int(name[1:])
            if not 1 <= i <= self.nbits or v not in (0, 1):
                raise BackendError(f"invalid bit assignment {name}={v}")
            bits[i - 1] = v
        if amps is None:
            amps = np.zeros(2 ** self.nqubits, dtype=complex)
            amps[0] = 1
        return self.make_state(bits, amps)

    # -- channels ---------------------------------------------------------

    def interp_gate(self, g: Gate, s: CQState) -> Valuation:
        spec = self.gates.get(g.name)
        if spec is None:
            raise BackendError(f"unknown gate {g.name!r}")
        if spec.arity != len(g.qubits):
            raise BackendError(f"gate {g.name} expects {spec.arity} qubit(s)")
        psi = apply_unitary(spec.matrix, s.tensor(), [q - 1 for q in g.qubits])
        return Valuation.point(CQState(s.bits, psi, self.eps_key))

    def _split(self, s: CQState, qubit: int):
        """Computational-basis branches ``(weight, b, collapsed tensor)`` of a qubit."""
        axis = qubit - 1
        psi = s.tensor()
        p0, p1 = branch_weights(psi, axis)
        if p0 < self.eps_norm and p1 < self.eps_norm:
            raise BackendError("amplitude corruption: both branch weights vanish")
        if p0 < self.eps_norm:
            weights = [(ONE, 1)]
        elif p1 < self.eps_norm:
            weights = [(ONE, 0)]
        else:
            w0 = rationalize(p0 / (p0 + p1), self.max_denominator, self.eps_prob)
            weights = [(w0, 0), (1 - w0, 1)]
        out = []
        for w, b in weights:
            pb = p0 if b == 0 else p1
            collapsed = np.zeros_like(psi)
            idx = [slice(None)] * psi.ndim
            idx[axis] = b
            collapsed[tuple(idx)] = psi[tuple(idx)] / np.sqrt(pb)
            out.append((w, b, collapsed, idx))
        return out

    def interp_measure(self, m: Measure, s: CQState) -> Valuation:
        terms = []
        for w, b, collapsed, _ in self._split(s, m.qubit):
            bits = list(s.bits)
            bits[m.bit - 1] = b
            terms.append((CQState(bits, collapsed, self.eps_key), w))
        return Valuation(terms)

    def interp_reset(self, r: Reset, s: CQState) -> Valuation:
        terms = []
        for w, b, collapsed, idx in self._split(s, r.qubit):
            moved = np.zeros_like(collapsed)
            dst = list(idx)
            dst[r.qubit - 1] = 0
            moved[tuple(dst)] = collapsed[tuple(idx)]
            terms.append((CQState(s.bits, moved, self.eps_key), w))
        return Valuation(terms)

    def interp_atomic(self, a, s: CQState) -> Valuation:
        if isinstance(a, Gate):
            return self.interp_gate(a, s)
        if isinstance(a, Measure):
            return self.interp_measure(a, s)
        if isinstance(a, Reset):
            return self.interp_reset(a, s)
        raise BackendError(f"not a quantum atomic program: {a!r}")

    def interp_cond(self, c, s: CQState) -> bool:
        match c:
            case BoolConst(v):
                return v
            case BitTest(bit, value):
                return s.bits[bit - 1] == value
            case Not(x):
                return not self.interp_cond(x, s)
            case And(l, r):
                return self.interp_cond(l, s) and self.interp_cond(r, s)
            case Or(l, r):
                return self.interp_cond(l, s) or self.interp_cond(r, s)
        raise BackendError(f"not a quantum condition: {c!r}")

    def state_json(self, s: CQState) -> dict:
        return {
            "bits": s.key[0],
            "amps": [[round(float(a.real), 12), round(float(a.imag), 12)] for a in s.amps],
        }

    def format_state(self, s: CQState) -> str:
        return json.dumps(self.state_json(s), separators=(",", ":"))



def canonical_key(s: CQState) -> tuple:
    return s.key
