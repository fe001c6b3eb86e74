"""Common surface of the state-space instantiations."""

from __future__ import annotations

from .syntax import Condition, Header


class Backend:
    """States ``S``, atomic programs ``S -> V(S)`` and conditions ``S -> bool``.

    Subclasses must return full-probability valuations from
    :meth:`interp_atomic`, with states that are hashable, immutable and
    expose ``sort_key()``.
    """

    header: Header

    def interp_atomic(self, atomic, state):
        raise NotImplementedError

    def interp_cond(self, cond: Condition, state) -> bool:
        raise NotImplementedError

    def initial_state(self, assignment: dict | None = None):
        raise NotImplementedError

    def state_json(self, state):
        raise NotImplementedError

    def format_state(self, state) -> str:
        raise NotImplementedError


def make_backend(header: Header, **options) -> Backend:
    if header.kind == "quantum":
        from .quantum import QuantumBackend

        return QuantumBackend(header.bits, header.qubits, **options)
    from .classical import ClassicalBackend

    return ClassicalBackend(header.variables, **options)


def parse_assignment(text: str | None) -> dict:
    """Parse ``"x=0,y=1"`` into ``{"x": 0, "y": 1}``."""
    out = {}
    if not text:
        return out
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"expected name=value, got {part!r}")
        out[name.strip()] = int(value.strip())
    return out
