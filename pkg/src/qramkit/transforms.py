"""Distribution-preserving QRAM rewrites: address shifting, address safety, measurement postponement."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .qram import (
    Add,
    Cnot,
    H,
    INDIRECT_FORMS,
    Instruction,
    LoadConst,
    LoadIndirect,
    Measure,
    QramProgram,
    Read,
    Reg,
    StoreIndirect,
    Sub,
    T,
    Tra,
    Write,
    map_registers,
)

SHIFT_LENGTHS: dict[type, int] = {
    LoadConst: 1,
    Add: 1,
    Sub: 1,
    LoadIndirect: 6,
    StoreIndirect: 6,
    Tra: 1,
    Read: 1,
    Write: 1,
    Cnot: 1,
    H: 1,
    T: 1,
    Measure: 1,
}

POSTPONE_LENGTHS: dict[type, int] = {
    LoadConst: 1,
    Add: 1,
    Sub: 1,
    LoadIndirect: 1,
    StoreIndirect: 1,
    Tra: 1,
    Read: 1,
    Write: 1,
    Cnot: 7,
    H: 4,
    T: 4,
    Measure: 12,
}

SAFE_REGISTER = "tmp"
POSTPONE_REGISTERS = ("mea", "a", "b")


def _labels(lengths: list[int]) -> tuple[int, ...]:
    out = [0]
    for n in lengths:
        out.append(out[-1] + n)
    return tuple(out)


@dataclass(frozen=True)
class ShiftPlan:
    delta: int
    lengths: tuple[int, ...]
    labels: tuple[int, ...]  # labels[m] for 0 <= m <= L

    @classmethod
    def for_program(cls, program: QramProgram, k: int) -> ShiftPlan:
        if k < 1:
            raise ValueError("shift amount k must be positive")
        lengths = [SHIFT_LENGTHS[type(ins)] for ins in program]
        return cls(k + 1, tuple(lengths), _labels(lengths))

    @property
    def total(self) -> int:
        return self.labels[-1]


@dataclass(frozen=True)
class PostponePlan:
    lengths: tuple[int, ...]
    labels: tuple[int, ...]
    aux: tuple[str, ...] = POSTPONE_REGISTERS
    delta: int = 4

    @classmethod
    def for_program(cls, program: QramProgram) -> PostponePlan:
        lengths = [POSTPONE_LENGTHS[type(ins)] for ins in program]
        return cls(tuple(lengths), _labels(lengths))

    @staticmethod
    def f(x: int) -> int:
        return 2 * x

    @staticmethod
    def g(x: int) -> int:
        return 2 * x + 1


def _shift(program: QramProgram, k: int, pinned: Mapping[str, int]) -> QramProgram:
    plan = ShiftPlan.for_program(program, k)
    d = plan.delta
    end = plan.total

    def sh(r: Reg) -> int:
        if isinstance(r, str):
            return pinned[r]
        return r + d

    out: list[Instruction] = []
    for ins in program:
        if isinstance(ins, LoadIndirect):
            out += [
                LoadConst(0, 0),
                Sub(0, 0, sh(ins.j)),
                Tra(end, 0),
                LoadConst(0, d),
                Add(0, 0, sh(ins.j)),
                LoadIndirect(sh(ins.i), 0),
            ]
        elif isinstance(ins, StoreIndirect):
            out += [
                LoadConst(0, 0),
                Sub(0, 0, sh(ins.i)),
                Tra(end, 0),
                LoadConst(0, d),
                Add(0, 0, sh(ins.i)),
                StoreIndirect(0, sh(ins.j)),
            ]
        elif isinstance(ins, Tra):
            out.append(Tra(plan.labels[ins.m], sh(ins.j)))
        else:
            out.append(map_registers(ins, sh))
    return QramProgram(tuple(out))


def shift_addresses(program: QramProgram, k: int) -> QramProgram:
    """Equivalent program that never touches registers X1..Xk; X0 is scratch."""
    return _shift(program, k, {})


def _guard(reg: Reg, end: int) -> list[Instruction]:
    t = SAFE_REGISTER
    return [LoadConst(t, 0), Sub(t, t, reg), Tra(end, t)]


def _guarded_operands(ins: Instruction) -> tuple[Reg, ...]:
    if isinstance(ins, LoadIndirect):
        return (ins.j,)
    if isinstance(ins, StoreIndirect):
        return (ins.i,)
    if isinstance(ins, Cnot):
        return (ins.i, ins.j)
    if isinstance(ins, (H, T)):
        return (ins.i,)
    if isinstance(ins, Measure):
        return (ins.j,)
    return ()


def make_address_safe(program: QramProgram) -> QramProgram:
    """Guard every register used as an address, then free ``tmp`` by a shift of one.

    A negative address jumps past the end, which halts with the same output
    the original invalid access would have produced.
    """
    lengths = [1 + 3 * len(_guarded_operands(ins)) for ins in program]
    labels = _labels(lengths)
    end = labels[-1]
    out: list[Instruction] = []
    for ins in program:
        for r in _guarded_operands(ins):
            out += _guard(r, end)
        out.append(Tra(labels[ins.m], ins.j) if isinstance(ins, Tra) else ins)
    return _shift(QramProgram(tuple(out)), 1, {SAFE_REGISTER: 1})


def _is_guard(seq: list[Instruction], reg: Reg, end: int) -> bool:
    g0, g1, g2 = seq
    return (
        isinstance(g0, LoadConst) and g0.c == 0
        and isinstance(g1, Sub) and g1.i == g1.j == g0.i and g1.k == reg
        and isinstance(g2, Tra) and g2.j == g0.i and g2.m == end
    )


def is_guarded(program: QramProgram) -> bool:
    """Static check that every address operand is verified non-negative right before use.

    Accepts both the three-instruction guard and the offset form produced
    by the shift (guard on ``s``, then ``r <- d; r <- r + s`` with ``d >= 0``).
    """
    ins = list(program.instructions)
    end = len(ins)
    targets = {x.m for x in ins if isinstance(x, Tra)}
    for pos, cur in enumerate(ins):
        regs = _guarded_operands(cur)
        start = pos
        for r in reversed(regs):
            if start >= 5 and isinstance(cur, INDIRECT_FORMS):
                a, b = ins[start - 2], ins[start - 1]
                if (
                    isinstance(a, LoadConst) and a.i == r and a.c >= 0
                    and isinstance(b, Add) and b.i == b.j == r and b.k != r
                    and _is_guard(ins[start - 5 : start - 2], b.k, end)
                ):
                    start -= 5
                    continue
            if start >= 3 and _is_guard(ins[start - 3 : start], r, end):
                start -= 3
                continue
            return False
        if any(start < t <= pos for t in targets):
            return False
    return True


def postpone_measurements(program: QramProgram) -> QramProgram:
    """Equivalent program that never operates on a qubit after measuring it.

    Gates act on even qubits ``2x``; the n-th measurement copies its source
    onto the fresh odd qubit ``2n+1`` with a CNOT and measures that instead.
    """
    plan = PostponePlan.for_program(program)
    mea, a, b = POSTPONE_REGISTERS
    out: list[Instruction] = []
    for ins in program:
        if isinstance(ins, Cnot):
            out += [
                LoadConst(a, 0), Add(a, a, ins.i), Add(a, a, a),
                LoadConst(b, 0), Add(b, b, ins.j), Add(b, b, b),
                Cnot(a, b),
            ]
        elif isinstance(ins, (H, T)):
            out += [LoadConst(a, 0), Add(a, a, ins.i), Add(a, a, a), type(ins)(a)]
        elif isinstance(ins, Measure):
            out += [
                LoadConst(a, 1),
                Add(mea, mea, a),
                LoadConst(b, 0),
                Add(b, b, mea),
                Add(b, b, b),
                LoadConst(a, 1),
                Add(b, b, a),
                LoadConst(a, 0),
                Add(a, a, ins.j),
                Add(a, a, a),
                Cnot(a, b),
                Measure(ins.i, b),
            ]
        elif isinstance(ins, Tra):
            out.append(Tra(plan.labels[ins.m], ins.j))
        else:
            out.append(ins)
    pinned = {name: n for n, name in enumerate(POSTPONE_REGISTERS, 1)}
    return _shift(QramProgram(tuple(out)), plan.delta - 1, pinned)
