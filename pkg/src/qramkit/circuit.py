"""Quantum circuits in the flat integer description format, with dense simulation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ring import INV_SQRT2, ONE, ZERO, ExactAmplitude, RealQ2, format_amplitude, parse_amplitude

SEPARATOR = -1
_RING_TOKENS = {"1", "-1", "1/sqrt2", "-1/sqrt2", "w", "-w", "i", "-i", "0"}


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Unitary:
    """A ``2^c x 2^c`` gate matrix; ``exact`` keeps ring entries when known."""

    arity: int
    matrix: np.ndarray = field(compare=False, repr=False)
    exact: tuple[tuple[ExactAmplitude, ...], ...] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        dim = 1 << self.arity
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (dim, dim):
            raise CircuitError(f"matrix must be {dim}x{dim} for arity {self.arity}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_exact(cls, rows: Sequence[Sequence[ExactAmplitude]]) -> Unitary:
        arity = int(math.log2(len(rows)))
        m = np.array([[complex(a) for a in r] for r in rows])
        return cls(arity, m, tuple(tuple(r) for r in rows))

    def defect(self) -> float:
        m = self.matrix
        return float(np.max(np.abs(m.conj().T @ m - np.eye(len(m)))))


def _h() -> Unitary:
    h = INV_SQRT2
    return Unitary.from_exact([[h, h], [h, -h]])


def _t() -> Unitary:
    return Unitary.from_exact([[ONE, ZERO], [ZERO, ExactAmplitude(0, 1)]])


def _cnot() -> Unitary:
    o, z = ONE, ZERO
    return Unitary.from_exact([[o, z, z, z], [z, o, z, z], [z, z, z, o], [z, z, o, z]])


STANDARD_GATES = {"H": _h, "T": _t, "CNOT": _cnot}


@dataclass(frozen=True)
class Circuit:
    """``(U, A, B, f)`` over qubits ``0 .. n-1``.

    ``inputs`` and ``outputs`` are ordered: ``x_l`` goes to ``inputs[l]`` and
    ``y_l`` is read from ``outputs[l]``.  ``init`` fixes every non-input qubit.
    """

    n: int
    gates: tuple[tuple[int, tuple[int, ...]], ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    init: Mapping[int, int]
    unitaries: Mapping[int, Unitary] = field(repr=False)

    def __post_init__(self) -> None:
        qubits = range(self.n)
        for gid, wires in self.gates:
            if gid not in self.unitaries:
                raise CircuitError(f"gate id {gid} has no unitary")
            if len(wires) != self.unitaries[gid].arity:
                raise CircuitError(f"gate {gid} acts on {self.unitaries[gid].arity} qubit(s), got {len(wires)}")
            if len(set(wires)) != len(wires):
                raise CircuitError(f"gate {gid} repeats a wire: {wires}")
            if any(w not in qubits for w in wires):
                raise CircuitError(f"wire out of range in {wires}")
        for part, name in ((self.inputs, "input"), (self.outputs, "output")):
            if len(set(part)) != len(part) or any(q not in qubits for q in part):
                raise CircuitError(f"bad {name} qubit list {part}")
        if set(self.init) != set(qubits) - set(self.inputs):
            raise CircuitError("initial bits must cover exactly the non-input qubits")
        if any(v not in (0, 1) for v in self.init.values()):
            raise CircuitError("initial bits must be 0 or 1")

    @property
    def a(self) -> int:
        return len(self.inputs)

    @property
    def b(self) -> int:
        return len(self.outputs)

    @property
    def t(self) -> int:
        return len(self.gates)

    @property
    def is_exact(self) -> bool:
        return all(self.unitaries[g].exact is not None for g, _ in self.gates)

    def with_unitaries(self, unitaries: Mapping[int, Unitary]) -> Circuit:
        return Circuit(self.n, self.gates, self.inputs, self.outputs, self.init, dict(unitaries))


def _split(ints: Sequence[int]) -> list[list[int]]:
    parts: list[list[int]] = [[]]
    for v in ints:
        if v == SEPARATOR:
            parts.append([])
        else:
            parts[-1].append(v)
    if len(parts) != 5 or parts[-1]:
        raise CircuitError("description needs exactly four parts, each closed by -1")
    return parts[:4]


def parse_circuit_description(ints: Sequence[int], unitaries: Mapping[int, Unitary]) -> Circuit:
    """Decode ``gates -1 inputs -1 outputs -1 init -1``.

    The init part lists the bits of the non-input qubits in increasing
    qubit order, so ``n = a + len(init)``.
    """
    ints = [int(v) for v in ints]
    if any(v < SEPARATOR for v in ints):
        raise CircuitError("negative entries other than the -1 separator")
    gate_part, a_part, b_part, f_part = _split(ints)
    n = len(a_part) + len(f_part)
    gates = []
    i = 0
    while i < len(gate_part):
        gid = gate_part[i]
        if gid not in unitaries:
            raise CircuitError(f"gate id {gid} not in 1..{max(unitaries, default=0)}")
        c = unitaries[gid].arity
        wires = tuple(gate_part[i + 1 : i + 1 + c])
        if len(wires) != c:
            raise CircuitError(f"gate {gid} truncated: expected {c} wire(s)")
        gates.append((gid, wires))
        i += 1 + c
    rest = [q for q in range(n) if q not in set(a_part)]
    if len(rest) != len(f_part):
        raise CircuitError("input qubits must lie in 0..n-1")
    return Circuit(n, tuple(gates), tuple(a_part), tuple(b_part), dict(zip(rest, f_part)), dict(unitaries))


def format_circuit_description(c: Circuit) -> list[int]:
    out: list[int] = []
    for gid, wires in c.gates:
        out += [gid, *wires]
    out.append(SEPARATOR)
    out += [*c.inputs, SEPARATOR, *c.outputs, SEPARATOR]
    out += [c.init[q] for q in sorted(c.init)]
    out.append(SEPARATOR)
    return out


def parse_description_text(text: str) -> list[int]:
    body = " ".join(line.split("#", 1)[0] for line in text.splitlines())
    try:
        return [int(tok) for tok in body.replace(",", " ").split()]
    except ValueError as exc:
        raise CircuitError(f"not an integer list: {exc}") from None


def parse_matrix_file(text: str, check: bool = True) -> dict[int, Unitary]:
    """``gate <id> <arity>`` headers, each followed by ``2^c`` rows of ``re,im`` pairs.

    A ring token (``1/sqrt2``, ``-1``, ``w``, ...) may stand in for a pair,
    which keeps the gate usable in exact mode.
    """
    gates: dict[int, Unitary] = {}
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if len(head) != 3 or head[0] != "gate":
            raise CircuitError(f"expected 'gate <id> <arity>', got {lines[i]!r}")
        gid, arity = int(head[1]), int(head[2])
        if gid < 1:
            raise CircuitError("gate ids start at 1")
        dim = 1 << arity
        rows = lines[i + 1 : i + 1 + dim]
        if len(rows) != dim:
            raise CircuitError(f"gate {gid}: expected {dim} rows")
        floats, exact = [], []
        for r in rows:
            toks = r.split()
            if len(toks) != dim:
                raise CircuitError(f"gate {gid}: expected {dim} entries per row")
            fr, er = [], []
            for tok in toks:
                if "," in tok:
                    re_, im_ = tok.split(",")
                    fr.append(complex(float(re_), float(im_)))
                    er.append(None)
                else:
                    a = parse_amplitude(tok)
                    fr.append(complex(a))
                    er.append(a if isinstance(a, ExactAmplitude) else None)
            floats.append(fr)
            exact.append(er)
        ex = None
        if all(e is not None for r in exact for e in r):
            ex = tuple(tuple(r) for r in exact)
        u = Unitary(arity, np.array(floats), ex)
        if check and u.defect() > 1e-9:
            raise CircuitError(f"gate {gid} is not unitary (defect {u.defect():.3g})")
        if gid in gates:
            raise CircuitError(f"gate {gid} defined twice")
        gates[gid] = u
        i += 1 + dim
    return gates


def format_matrix_file(unitaries: Mapping[int, Unitary]) -> str:
    out = []
    for gid in sorted(unitaries):
        u = unitaries[gid]
        out.append(f"gate {gid} {u.arity}")
        if u.exact is not None and all(format_amplitude(e) in _RING_TOKENS for r in u.exact for e in r):
            for row in u.exact:
                out.append(" ".join(format_amplitude(e) for e in row))
        else:
            for row in u.matrix:
                out.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# execution


def _initial_bits(c: Circuit, x: str) -> list[int]:
    if len(x) != c.a or any(ch not in "01" for ch in x):
        raise CircuitError(f"input must be a bitstring of length {c.a}")
    bits = [0] * c.n
    for q, v in c.init.items():
        bits[q] = v
    for q, ch in zip(c.inputs, x):
        bits[q] = int(ch)
    return bits


def final_state(c: Circuit, x: str) -> np.ndarray:
    """``G_t ... G_1 |psi_x>`` as an array of shape ``(2,) * n``; qubit 0 is axis 0."""
    psi = np.zeros((2,) * c.n, dtype=complex)
    psi[tuple(_initial_bits(c, x))] = 1.0
    for gid, wires in c.gates:
        u = c.unitaries[gid]
        k = u.arity
        g = u.matrix.reshape((2,) * (2 * k))
        psi = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(wires)))
        psi = np.moveaxis(psi, list(range(k)), list(wires))
    return psi


def _dist_float(c: Circuit, x: str) -> dict[str, float]:
    probs = np.abs(final_state(c, x)) ** 2
    others = tuple(q for q in range(c.n) if q not in c.outputs)
    marg = probs.sum(axis=others) if others else probs
    kept = [q for q in range(c.n) if q in c.outputs]
    marg = np.transpose(marg, [kept.index(q) for q in c.outputs]) if c.outputs else marg
    out = {}
    for y in product("01", repeat=c.b):
        p = float(marg[tuple(int(ch) for ch in y)]) if c.b else float(marg)
        out["".join(y)] = p
    return out


def _dist_exact(c: Circuit, x: str) -> dict[str, RealQ2]:
    state: dict[tuple[int, ...], ExactAmplitude] = {tuple(_initial_bits(c, x)): ONE}
    for gid, wires in c.gates:
        m = c.unitaries[gid].exact
        new: dict[tuple[int, ...], ExactAmplitude] = {}
        for basis, amp in state.items():
            col = 0
            for w in wires:
                col = (col << 1) | basis[w]
            for row in range(len(m)):
                e = m[row][col]
                if e.is_zero():
                    continue
                bits = list(basis)
                for i, w in enumerate(wires):
                    bits[w] = (row >> (len(wires) - 1 - i)) & 1
                key = tuple(bits)
                v = amp * e
                new[key] = new[key] + v if key in new else v
        state = {k: v for k, v in new.items() if not v.is_zero()}
    out = {"".join(y): RealQ2(0) for y in product("01", repeat=c.b)}
    for basis, amp in state.items():
        y = "".join(str(basis[q]) for q in c.outputs)
        out[y] = out[y] + amp.norm_sq()
    return out


def run_circuit(c: Circuit, x: str, mode: str = "auto") -> dict:
    """``y -> C(x, y)`` for every ``y`` in ``{0,1}^b``.

    ``auto`` runs exactly when every gate carries ring entries.
    """
    if mode == "auto":
        mode = "exact" if c.is_exact else "float"
    if mode == "exact":
        if not c.is_exact:
            raise CircuitError("exact mode needs ring-valued gate matrices")
        return _dist_exact(c, x)
    if mode == "float":
        return _dist_float(c, x)
    raise ValueError(f"unknown mode {mode!r}")


def circuit_operator(c: Circuit) -> np.ndarray:
    """The full ``2^n x 2^n`` matrix of ``G_t ... G_1`` (qubit 0 most significant)."""
    dim = 1 << c.n
    cols = []
    for v in range(dim):
        psi = np.zeros((2,) * c.n, dtype=complex)
        psi[tuple((v >> (c.n - 1 - q)) & 1 for q in range(c.n))] = 1.0
        for gid, wires in c.gates:
            u = c.unitaries[gid]
            k = u.arity
            g = u.matrix.reshape((2,) * (2 * k))
            psi = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), list(wires)))
            psi = np.moveaxis(psi, list(range(k)), list(wires))
        cols.append(psi.reshape(dim))
    return np.array(cols).T


def circuit_output_gap(c1: Circuit, c2: Circuit) -> float:
    """``max |C1(x, y) - C2(x, y)|`` over all inputs and outputs."""
    if (c1.n, c1.inputs, c1.outputs, dict(c1.init)) != (c2.n, c2.inputs, c2.outputs, dict(c2.init)):
        raise CircuitError("circuits must share n, A, B and f")
    gap = 0.0
    for xs in product("01", repeat=c1.a):
        x = "".join(xs)
        d1, d2 = _dist_float(c1, x), _dist_float(c2, x)
        gap = max(gap, max(abs(d1[y] - d2[y]) for y in d1))
    return gap


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def perturbation(dim: int, eps: float, rng: np.random.Generator) -> np.ndarray:
    """Unitary ``V = exp(i theta K)`` with ``||V - I||_2 < eps``.

    ``K`` is a random Hermitian matrix of spectral norm one; the eigenvalues
    of ``V`` are ``exp(i theta k)`` with ``|k| <= 1``, so the distance to the
    identity is at most ``2 sin(theta / 2) < theta``.
    """
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    k = (a + a.conj().T) / 2
    w, v = np.linalg.eigh(k)
    w = w / np.max(np.abs(w))
    theta = eps * rng.uniform(0.5, 0.999)
    return (v * np.exp(1j * theta * w)) @ v.conj().T


def operator_norm(m: np.ndarray) -> float:
    return float(np.linalg.norm(m, 2))


# --------------------------------------------------------------------------
# shape bookkeeping for circuit families simulating a QTM


def cell_width(num_states: int, num_symbols: int) -> int:
    """``l = 2 + ceil(log2(|Q| + 1)) + ceil(log2 |Sigma|)`` qubits per tape cell."""
    return 2 + math.ceil(math.log2(num_states + 1)) + math.ceil(math.log2(num_symbols))


def family_width(t: int, ell: int) -> int:
    """``k(n) = (2 T(n) + 4) l``."""
    return (2 * t + 4) * ell


def family_outputs(t: int, num_symbols: int) -> int:
    """``b(n) = ceil(log2 |Sigma|) (2 T(n) + 1)``."""
    return math.ceil(math.log2(num_symbols)) * (2 * t + 1)


def standard_unitaries() -> dict[int, Unitary]:
    """Ids 1, 2, 3 for H, T and CNOT."""
    return {1: _h(), 2: _t(), 3: _cnot()}


def random_circuit(
    n: int, depth: int, rng: np.random.Generator, inputs: Iterable[int] | None = None, outputs: Iterable[int] | None = None
) -> Circuit:
    """Random circuit over freshly drawn Haar gates on 1 or 2 qubits."""
    unitaries: dict[int, Unitary] = {}
    gates = []
    for g in range(1, depth + 1):
        arity = 1 if n == 1 else int(rng.integers(1, 3))
        unitaries[g] = Unitary(arity, random_unitary(1 << arity, rng))
        wires = tuple(int(w) for w in rng.choice(n, size=arity, replace=False))
        gates.append((g, wires))
    a = tuple(inputs) if inputs is not None else tuple(range(int(rng.integers(0, n + 1))))
    b = tuple(outputs) if outputs is not None else tuple(range(n))
    init = {q: int(rng.integers(0, 2)) for q in range(n) if q not in a}
    return Circuit(n, tuple(gates), a, b, init, unitaries)
