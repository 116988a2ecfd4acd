"""QRAM programs: instruction forms, a text assembler and the step relation."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Iterable, Mapping, Union

from .cost import CostModel, l
from .qstate import CNOT as _cnot
from .qstate import H as _h
from .qstate import T as _t
from .qstate import Probability, QState, apply_gate, arith, measure_qubit

Reg = Union[int, str]  # str registers are placeholders used inside transforms


@dataclass(frozen=True)
class LoadConst:
    i: Reg
    c: int


@dataclass(frozen=True)
class Add:
    i: Reg
    j: Reg
    k: Reg


@dataclass(frozen=True)
class Sub:
    i: Reg
    j: Reg
    k: Reg


@dataclass(frozen=True)
class LoadIndirect:
    i: Reg
    j: Reg


@dataclass(frozen=True)
class StoreIndirect:
    i: Reg
    j: Reg


@dataclass(frozen=True)
class Tra:
    m: int
    j: Reg


@dataclass(frozen=True)
class Read:
    i: Reg


@dataclass(frozen=True)
class Write:
    i: Reg


@dataclass(frozen=True)
class Cnot:
    i: Reg
    j: Reg


@dataclass(frozen=True)
class H:
    i: Reg


@dataclass(frozen=True)
class T:
    i: Reg


@dataclass(frozen=True)
class Measure:
    i: Reg
    j: Reg


Instruction = Union[
    LoadConst, Add, Sub, LoadIndirect, StoreIndirect, Tra, Read, Write, Cnot, H, T, Measure
]
INSTRUCTION_FORMS = (LoadConst, Add, Sub, LoadIndirect, StoreIndirect, Tra, Read, Write, Cnot, H, T, Measure)
QUANTUM_FORMS = (Cnot, H, T, Measure)
INDIRECT_FORMS = (LoadIndirect, StoreIndirect)


def register_fields(ins: Instruction) -> tuple[str, ...]:
    return tuple(f.name for f in fields(ins) if f.name not in ("c", "m"))


def map_registers(ins: Instruction, fn: Callable[[Reg], Reg]) -> Instruction:
    return replace(ins, **{name: fn(getattr(ins, name)) for name in register_fields(ins)})


class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class QramProgram:
    instructions: tuple[Instruction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        n = len(self.instructions)
        for pos, ins in enumerate(self.instructions):
            if isinstance(ins, Tra) and not 0 <= ins.m <= n:
                raise ProgramError(f"instruction {pos}: TRA target {ins.m} outside [0, {n}]")
            for name in register_fields(ins):
                r = getattr(ins, name)
                if isinstance(r, int) and r < 0:
                    raise ProgramError(f"instruction {pos}: negative register index {r}")

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)

    def __getitem__(self, idx: int) -> Instruction:
        return self.instructions[idx]

    def is_concrete(self) -> bool:
        return all(
            isinstance(getattr(ins, n), int) for ins in self.instructions for n in register_fields(ins)
        )


# --------------------------------------------------------------------------
# assembler

_R = r"X(-?\d+)"
_PATTERNS: list[tuple[re.Pattern, Callable]] = [
    (re.compile(rf"^{_R}\s*<-\s*X\[\s*{_R}\s*\]$", re.I), lambda m: LoadIndirect(int(m[1]), int(m[2]))),
    (re.compile(rf"^X\[\s*{_R}\s*\]\s*<-\s*{_R}$", re.I), lambda m: StoreIndirect(int(m[1]), int(m[2]))),
    (re.compile(rf"^{_R}\s*<-\s*M\s+Q\[\s*{_R}\s*\]$", re.I), lambda m: Measure(int(m[1]), int(m[2]))),
    (re.compile(rf"^{_R}\s*<-\s*{_R}\s*\+\s*{_R}$", re.I), lambda m: Add(int(m[1]), int(m[2]), int(m[3]))),
    (re.compile(rf"^{_R}\s*<-\s*{_R}\s*-\s*{_R}$", re.I), lambda m: Sub(int(m[1]), int(m[2]), int(m[3]))),
    (re.compile(rf"^{_R}\s*<-\s*(-?\d+)$", re.I), lambda m: LoadConst(int(m[1]), int(m[2]))),
    (re.compile(rf"^READ\s+{_R}$", re.I), lambda m: Read(int(m[1]))),
    (re.compile(rf"^WRITE\s+{_R}$", re.I), lambda m: Write(int(m[1]))),
    (re.compile(rf"^CNOT\s+Q\[\s*{_R}\s*\]\s*,?\s*Q\[\s*{_R}\s*\]$", re.I), lambda m: Cnot(int(m[1]), int(m[2]))),
    (re.compile(rf"^H\s+Q\[\s*{_R}\s*\]$", re.I), lambda m: H(int(m[1]))),
    (re.compile(rf"^T\s+Q\[\s*{_R}\s*\]$", re.I), lambda m: T(int(m[1]))),
]
_TRA = re.compile(rf"^TRA\s+([A-Za-z_][\w]*|\d+)\s+IF\s+{_R}\s*>\s*0$", re.I)
_LABEL = re.compile(r"^([A-Za-z_][\w]*)\s*:\s*(.*)$")


def parse_qram(text: str) -> QramProgram:
    """Assemble QRAM source; labels resolve to instruction indices."""
    pending: list[tuple[int, str]] = []
    labels: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        while True:
            m = _LABEL.match(line)
            if not m:
                break
            name = m[1]
            if name in labels:
                raise ProgramError(f"line {lineno}: duplicate label {name!r}")
            labels[name] = len(pending)
            line = m[2].strip()
        if line:
            pending.append((lineno, line))

    return QramProgram(tuple(_parse_line(line, labels, lineno) for lineno, line in pending))


def _parse_line(line: str, labels: Mapping[str, int], lineno: int) -> Instruction:
    norm = re.sub(r"\s+", " ", line)
    m = _TRA.match(norm)
    if m:
        target = m[1]
        if target.isdigit():
            dest = int(target)
        elif target in labels:
            dest = labels[target]
        else:
            raise ProgramError(f"line {lineno}: unresolved label {target!r}")
        reg = int(m[2])
        if reg < 0:
            raise ProgramError(f"line {lineno}: negative register index {reg}")
        return Tra(dest, reg)
    for pat, build in _PATTERNS:
        m = pat.match(norm)
        if m:
            ins = build(m)
            for name in register_fields(ins):
                if getattr(ins, name) < 0:
                    raise ProgramError(f"line {lineno}: negative register index {getattr(ins, name)}")
            return ins
    raise ProgramError(f"line {lineno}: cannot parse {line!r}")


def format_instruction(ins: Instruction) -> str:
    if isinstance(ins, LoadConst):
        return f"X{ins.i} <- {ins.c}"
    if isinstance(ins, Add):
        return f"X{ins.i} <- X{ins.j} + X{ins.k}"
    if isinstance(ins, Sub):
        return f"X{ins.i} <- X{ins.j} - X{ins.k}"
    if isinstance(ins, LoadIndirect):
        return f"X{ins.i} <- X[X{ins.j}]"
    if isinstance(ins, StoreIndirect):
        return f"X[X{ins.i}] <- X{ins.j}"
    if isinstance(ins, Tra):
        return f"TRA {ins.m} IF X{ins.j} > 0"
    if isinstance(ins, Read):
        return f"READ X{ins.i}"
    if isinstance(ins, Write):
        return f"WRITE X{ins.i}"
    if isinstance(ins, Cnot):
        return f"CNOT Q[X{ins.i}] Q[X{ins.j}]"
    if isinstance(ins, H):
        return f"H Q[X{ins.i}]"
    if isinstance(ins, T):
        return f"T Q[X{ins.i}]"
    if isinstance(ins, Measure):
        return f"X{ins.i} <- M Q[X{ins.j}]"
    raise TypeError(ins)


def format_qram(program: QramProgram) -> str:
    return "".join(format_instruction(ins) + "\n" for ins in program)


# --------------------------------------------------------------------------
# configurations and the step relation


@dataclass(frozen=True)
class QramConfig:
    """``(xi, mu, psi, x, y)``; ``ic is None`` is the terminal marker."""

    ic: int | None
    mu: Mapping[int, int]
    psi: QState
    x: tuple[int, ...] = ()
    y: tuple[int, ...] = ()

    @property
    def terminal(self) -> bool:
        return self.ic is None

    def reg(self, i: int) -> int:
        return self.mu.get(i, 0)


def initial_config(inputs: Iterable[int], mode: str | None = None) -> QramConfig:
    return QramConfig(0, {}, QState.zero(mode), tuple(inputs), ())


@dataclass
class Monitor:
    """Per-path instrumentation carried alongside a running configuration."""

    watch: frozenset[int] = frozenset()
    watch_hits: int = 0
    track_measured: bool = False
    measured: set[int] = field(default_factory=set)
    measured_hits: int = 0
    invalid_halts: int = 0

    def copy(self) -> Monitor:
        return Monitor(
            self.watch, self.watch_hits, self.track_measured, set(self.measured),
            self.measured_hits, self.invalid_halts,
        )

    def touch(self, *regs: int) -> None:
        if self.watch:
            for r in regs:
                if r in self.watch:
                    self.watch_hits += 1

    def quantum(self, *qubits: int) -> None:
        if self.track_measured:
            for q in qubits:
                if q in self.measured:
                    self.measured_hits += 1


class RunState:
    """Mutable configuration used by the execution core."""

    __slots__ = ("ic", "ac", "mu", "psi", "inp", "pos", "out", "mon")

    def __init__(self, ic, mu, psi, inp, pos=0, out=None, ac=0, mon=None):
        self.ic = ic
        self.ac = ac
        self.mu = mu
        self.psi = psi
        self.inp = inp
        self.pos = pos
        self.out = out if out is not None else []
        self.mon = mon

    def fork(self) -> RunState:
        return RunState(
            self.ic, dict(self.mu), self.psi, self.inp, self.pos, list(self.out), self.ac,
            self.mon.copy() if self.mon is not None else None,
        )

    def read_input(self) -> int:
        a = self.inp[self.pos] if self.pos < len(self.inp) else -1
        self.pos += 1
        return a


def _measure(st: RunState, q: int, store: Callable[[RunState, int], None], t: int):
    branches = measure_qubit(st.psi, q)
    out = []
    for n, (p, outcome, post) in enumerate(branches):
        s = st if n == len(branches) - 1 else st.fork()
        s.psi = post
        store(s, outcome)
        if s.mon is not None and s.mon.track_measured:
            s.mon.measured.add(q)
        out.append((p, t, s))
    return out


def exec_qram(st: RunState, program: QramProgram, model: CostModel) -> list[tuple[Probability, int, RunState]]:
    """Advance ``st`` by one transition; mutates it and may fork on measurement."""
    one = arith(st.psi.mode).prob_one
    ic = st.ic
    if ic is None:
        raise ValueError("terminal configuration has no successor")
    if not 0 <= ic < len(program):
        st.ic = None
        return [(one, 1, st)]
    ins = program.instructions[ic]
    mu = st.mu
    mon = st.mon
    g = mu.get
    if isinstance(ins, LoadConst):
        mu[ins.i] = ins.c
        if mon:
            mon.touch(ins.i)
        st.ic = ic + 1
        return [(one, 1, st)]
    if isinstance(ins, (Add, Sub)):
        a, b = g(ins.j, 0), g(ins.k, 0)
        mu[ins.i] = a + b if isinstance(ins, Add) else a - b
        if mon:
            mon.touch(ins.i, ins.j, ins.k)
        st.ic = ic + 1
        return [(one, l(a, model) + l(b, model), st)]
    if isinstance(ins, LoadIndirect):
        a = g(ins.j, 0)
        if mon:
            mon.touch(ins.j)
        if a < 0:
            st.ic = None
            if mon:
                mon.invalid_halts += 1
            return [(one, l(a, model), st)]
        v = g(a, 0)
        mu[ins.i] = v
        if mon:
            mon.touch(a, ins.i)
        st.ic = ic + 1
        return [(one, l(a, model) + l(v, model), st)]
    if isinstance(ins, StoreIndirect):
        a = g(ins.i, 0)
        if mon:
            mon.touch(ins.i)
        if a < 0:
            st.ic = None
            if mon:
                mon.invalid_halts += 1
            return [(one, l(a, model), st)]
        v = g(ins.j, 0)
        mu[a] = v
        if mon:
            mon.touch(ins.j, a)
        st.ic = ic + 1
        return [(one, l(a, model) + l(v, model), st)]
    if isinstance(ins, Tra):
        a = g(ins.j, 0)
        if mon:
            mon.touch(ins.j)
        st.ic = ins.m if a > 0 else ic + 1
        return [(one, l(a, model), st)]
    if isinstance(ins, Read):
        a = st.read_input()
        mu[ins.i] = a
        if mon:
            mon.touch(ins.i)
        st.ic = ic + 1
        return [(one, l(a, model), st)]
    if isinstance(ins, Write):
        a = g(ins.i, 0)
        st.out.append(a)
        if mon:
            mon.touch(ins.i)
        st.ic = ic + 1
        return [(one, l(a, model), st)]
    if isinstance(ins, Cnot):
        a, b = g(ins.i, 0), g(ins.j, 0)
        t = l(a, model) + l(b, model)
        if mon:
            mon.touch(ins.i, ins.j)
        if a < 0 or b < 0 or a == b:
            st.ic = None
            if mon:
                mon.invalid_halts += 1
            return [(one, t, st)]
        if mon:
            mon.quantum(a, b)
        st.psi = apply_gate(st.psi, _cnot(a, b))
        st.ic = ic + 1
        return [(one, t, st)]
    if isinstance(ins, (H, T)):
        a = g(ins.i, 0)
        if mon:
            mon.touch(ins.i)
        if a < 0:
            st.ic = None
            if mon:
                mon.invalid_halts += 1
            return [(one, l(a, model), st)]
        if mon:
            mon.quantum(a)
        st.psi = apply_gate(st.psi, _h(a) if isinstance(ins, H) else _t(a))
        st.ic = ic + 1
        return [(one, l(a, model), st)]
    if isinstance(ins, Measure):
        a = g(ins.j, 0)
        t = l(a, model)
        if mon:
            mon.touch(ins.j)
        if a < 0:
            st.ic = None
            if mon:
                mon.invalid_halts += 1
            return [(one, t, st)]
        if mon:
            mon.quantum(a)
            mon.touch(ins.i)
        st.ic = ic + 1
        target = ins.i

        def store(s: RunState, outcome: int) -> None:
            s.mu[target] = outcome

        return _measure(st, a, store, t)
    raise TypeError(f"not a QRAM instruction: {ins!r}")


def _to_state(c: QramConfig) -> RunState:
    return RunState(c.ic, dict(c.mu), c.psi, c.x, 0, list(c.y))


def _to_config(st: RunState) -> QramConfig:
    mu = {k: v for k, v in st.mu.items() if v != 0}
    return QramConfig(st.ic, mu, st.psi, tuple(st.inp[st.pos :]), tuple(st.out))


def qram_step(c: QramConfig, program: QramProgram, model: CostModel = CostModel.LOGARITHMIC):
    """All successors of ``c`` as ``[(probability, time, config), ...]``."""
    if c.terminal:
        raise ValueError("terminal configuration has no successor")
    return [(p, t, _to_config(s)) for p, t, s in exec_qram(_to_state(c), program, model)]
