"""Sparse quantum state over an unbounded register file.

A :class:`QState` stores an (in general unnormalised) vector ``v`` together
with ``scale = ||v||^2``; the physical state is ``v / sqrt(scale)``.  This
keeps exact mode closed under measurement: projecting never needs a square
root, and the branch probability is the ratio of two exact reals.  When the
scale is a power of 1/2 the vector is renormalised exactly, since
``sqrt(2)`` lies in the ring.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .ring import INV_SQRT2, OMEGA, ONE, SQRT2, ExactAmplitude, RealQ2

Amplitude = Union[ExactAmplitude, complex]
Probability = Union[RealQ2, float]

FLOAT_TOL = 1e-9
_FLOAT_PRUNE = 1e-30

_mode = "exact"


def set_mode(mode: str) -> None:
    """Select ``"exact"`` or ``"float"`` amplitudes for newly created states."""
    global _mode
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown arithmetic mode {mode!r}")
    _mode = mode


def get_mode() -> str:
    return _mode


class _Exact:
    name = "exact"
    one = ONE
    inv_sqrt2 = INV_SQRT2
    omega = OMEGA
    prob_one: Probability = RealQ2(1)
    prob_zero: Probability = RealQ2(0)

    @staticmethod
    def is_zero(a: ExactAmplitude) -> bool:
        return a.is_zero()

    @staticmethod
    def norm_sq(a: ExactAmplitude) -> RealQ2:
        return a.norm_sq()

    @staticmethod
    def prob_is_zero(p: RealQ2) -> bool:
        return p.is_zero()


class _Float:
    name = "float"
    one = 1.0 + 0j
    inv_sqrt2 = 1 / math.sqrt(2) + 0j
    omega = complex(OMEGA)
    prob_one: Probability = 1.0
    prob_zero: Probability = 0.0

    @staticmethod
    def is_zero(a: complex) -> bool:
        return abs(a) ** 2 < _FLOAT_PRUNE

    @staticmethod
    def norm_sq(a: complex) -> float:
        return a.real * a.real + a.imag * a.imag

    @staticmethod
    def prob_is_zero(p: float) -> bool:
        return p < 1e-14


_ARITH = {"exact": _Exact, "float": _Float}


def arith(mode: str):
    return _ARITH[mode]


@dataclass(frozen=True)
class Gate:
    name: str  # "CNOT", "H" or "T"
    qubits: tuple[int, ...]


def CNOT(i: int, j: int) -> Gate:
    return Gate("CNOT", (i, j))


def H(i: int) -> Gate:
    return Gate("H", (i,))


def T(i: int) -> Gate:
    return Gate("T", (i,))


def _power_of_half(p: RealQ2) -> int | None:
    """Return k if p == 2**-k (k >= 0), else None."""
    if p.b != 0 or p.a.numerator != 1:
        return None
    den = p.a.denominator
    if den & (den - 1):
        return None
    return den.bit_length() - 1


class QState:
    """Immutable sparse state; basis states are bitmasks over qubit indices."""

    __slots__ = ("_amps", "_alloc", "_scale", "_mode")

    def __init__(
        self,
        amps: dict[int, Amplitude] | None = None,
        allocated: Iterable[int] = (),
        scale: Probability | None = None,
        mode: str | None = None,
    ) -> None:
        mode = mode or _mode
        ar = _ARITH[mode]
        if amps is None:
            amps = {0: ar.one}
        self._amps = {b: a for b, a in amps.items() if not ar.is_zero(a)}
        self._alloc = frozenset(allocated)
        self._mode = mode
        self._scale = ar.prob_one if scale is None else scale

    @classmethod
    def zero(cls, mode: str | None = None) -> QState:
        return cls(mode=mode)

    @classmethod
    def basis(cls, bits: dict[int, int], mode: str | None = None) -> QState:
        mask = 0
        for q, b in bits.items():
            if b:
                mask |= 1 << q
        ar = _ARITH[mode or _mode]
        return cls({mask: ar.one}, bits.keys(), mode=mode)

    @property
    def mode(self) -> str:
        return self._mode

    @property
    def allocated(self) -> frozenset[int]:
        return self._alloc

    @property
    def vector(self) -> dict[int, Amplitude]:
        """Stored (possibly unnormalised) amplitudes keyed by bitmask."""
        return dict(self._amps)

    @property
    def scale(self) -> Probability:
        """Squared norm of the stored vector."""
        return self._scale

    def is_normalized(self) -> bool:
        if self._mode == "exact":
            return self._scale == 1
        return abs(self._scale - 1.0) <= FLOAT_TOL

    def norm_sq(self) -> Probability:
        """Squared norm of the physical state (1 exactly in exact mode)."""
        ar = _ARITH[self._mode]
        total = ar.prob_zero
        for a in self._amps.values():
            total = total + ar.norm_sq(a)
        return total / self._scale

    def amplitudes(self) -> dict[str, complex]:
        """Normalised float amplitudes keyed by bit-strings over allocated qubits."""
        order = sorted(self._alloc)
        s = math.sqrt(float(self._scale))
        out = {}
        for mask, a in sorted(self._amps.items()):
            key = "".join(str((mask >> q) & 1) for q in order)
            out[key] = complex(a) / s
        return out

    def probability_of_one(self, q: int) -> Probability:
        ar = _ARITH[self._mode]
        total = ar.prob_zero
        for mask, a in self._amps.items():
            if (mask >> q) & 1:
                total = total + ar.norm_sq(a)
        return total / self._scale

    def apply(self, gate: Gate) -> QState:
        return apply_gate(self, gate)

    def same_state(self, other: QState) -> bool:
        """Equality of the physical (normalised) states."""
        if self._mode == "exact" and other._mode == "exact":
            inner = ExactAmplitude()
            for mask, a in self._amps.items():
                b = other._amps.get(mask)
                if b is not None:
                    inner = inner + a.conj() * b
            if not inner.imag_part().is_zero() or inner.real_part().sign() <= 0:
                return False
            return inner.norm_sq() == self._scale * other._scale
        a, b = self.amplitudes_by_mask(), other.amplitudes_by_mask()
        return all(abs(a.get(k, 0) - b.get(k, 0)) <= FLOAT_TOL for k in set(a) | set(b))

    def amplitudes_by_mask(self) -> dict[int, complex]:
        s = math.sqrt(float(self._scale))
        return {m: complex(a) / s for m, a in self._amps.items()}

    def to_float(self) -> QState:
        return QState(
            {m: complex(a) for m, a in self._amps.items()}, self._alloc, float(self._scale), "float"
        )

    def _derived(self, amps: dict[int, Amplitude], alloc: frozenset[int], scale: Probability) -> QState:
        st = QState.__new__(QState)
        st._amps = amps
        st._alloc = alloc
        st._scale = scale
        st._mode = self._mode
        return st

    def __repr__(self) -> str:
        return f"QState({self.amplitudes()!r}, mode={self._mode!r})"


def apply_gate(state: QState, gate: Gate) -> QState:
    """Apply CNOT(i, j), H(i) or T(i); equal CNOT wires are rejected."""
    ar = _ARITH[state._mode]
    if any(q < 0 for q in gate.qubits):
        raise ValueError(f"negative qubit index in {gate}")
    alloc = state._alloc.union(gate.qubits)
    amps = state._amps
    if gate.name == "CNOT":
        i, j = gate.qubits
        if i == j:
            raise ValueError("CNOT requires distinct control and target")
        bi, bj = 1 << i, 1 << j
        new = {(m ^ bj if m & bi else m): a for m, a in amps.items()}
        return state._derived(new, alloc, state._scale)
    (i,) = gate.qubits
    bit = 1 << i
    if gate.name == "T":
        w = ar.omega
        new = {m: (a * w if m & bit else a) for m, a in amps.items()}
        return state._derived(new, alloc, state._scale)
    if gate.name != "H":
        raise ValueError(f"unknown gate {gate.name!r}")
    s = ar.inv_sqrt2
    new: dict[int, Amplitude] = {}
    for m, a in amps.items():
        m0 = m & ~bit
        m1 = m | bit
        a_s = a * s
        new[m0] = new[m0] + a_s if m0 in new else a_s
        if m & bit:
            new[m1] = new[m1] - a_s if m1 in new else -a_s
        else:
            new[m1] = new[m1] + a_s if m1 in new else a_s
    new = {m: a for m, a in new.items() if not ar.is_zero(a)}
    return state._derived(new, alloc, state._scale)


def project(state: QState, q: int, outcome: int) -> tuple[Probability, QState]:
    """Unnormalised projection onto qubit ``q`` = ``outcome``.

    Returns ``(||P v||^2, P v)`` where the returned state's scale is set to
    the projected squared norm, so it represents the normalised post-state.
    """
    ar = _ARITH[state._mode]
    bit = 1 << q
    want = bit if outcome else 0
    amps = {m: a for m, a in state._amps.items() if (m & bit) == want}
    mass = ar.prob_zero
    for a in amps.values():
        mass = mass + ar.norm_sq(a)
    return mass, state._derived(amps, state._alloc | {q}, mass)


def _renormalise(state: QState) -> QState:
    if state._mode != "exact":
        return state
    k = _power_of_half(state._scale)
    if k is None or k == 0:
        return state
    # multiply by sqrt(2)^k so that the stored vector has unit norm
    factor = ONE
    for _ in range(k):
        factor = factor * SQRT2
    amps = {m: a * factor for m, a in state._amps.items()}
    return state._derived(amps, state._alloc, RealQ2(1))


def measure_qubit(state: QState, q: int) -> list[tuple[Probability, int, QState]]:
    """Computational-basis measurement of qubit ``q``.

    Returns ``[(p, outcome, post_state), ...]`` with outcome 0 first and
    zero-probability branches omitted.
    """
    if q < 0:
        raise ValueError("negative qubit index")
    ar = _ARITH[state._mode]
    branches = []
    for outcome in (0, 1):
        mass, post = project(state, q, outcome)
        if ar.prob_is_zero(mass):
            continue
        p = mass / state._scale
        branches.append((p, outcome, _renormalise(post)))
    return branches


def total_probability(ps: Iterable[Probability], mode: str) -> Probability:
    total = _ARITH[mode].prob_zero
    for p in ps:
        total = total + p
    return total


def as_fraction_if_rational(p: Probability) -> Fraction | float:
    if isinstance(p, RealQ2) and p.b == 0:
        return p.a
    return float(p)
