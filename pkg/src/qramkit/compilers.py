"""Cross-compilers between QRAM programs and QRASP images."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cost import CostModel
from .qram import (
    QUANTUM_FORMS,
    INDIRECT_FORMS,
    Add,
    Cnot,
    H,
    Instruction,
    LoadConst,
    LoadIndirect,
    Measure,
    QramProgram,
    Read,
    RunState,
    StoreIndirect,
    Sub,
    T,
    Tra,
    Write,
    exec_qram,
)
from .qrasp import OPCODES, QraspImage, exec_qrasp
from .qstate import QState
from .transforms import is_guarded, make_address_safe

SIMULATING_LENGTHS: dict[type, int] = {
    LoadConst: 4,
    Add: 8,
    Sub: 8,
    LoadIndirect: 12,
    StoreIndirect: 12,
    Tra: 6,
    Read: 2,
    Write: 2,
    Cnot: 15,
    H: 8,
    T: 8,
    Measure: 10,
}


def simulating_length(ins: Instruction) -> int:
    return SIMULATING_LENGTHS[type(ins)]


@dataclass(frozen=True)
class LabelMap:
    labels: tuple[int, ...]  # labels[m] for 0 <= m <= L
    delta: int

    @classmethod
    def for_program(cls, program: QramProgram) -> LabelMap:
        out = [0]
        for ins in program:
            out.append(out[-1] + simulating_length(ins))
        return cls(tuple(out), 20 * len(program))

    def __call__(self, m: int) -> int:
        return self.labels[m]

    @property
    def total(self) -> int:
        return self.labels[-1]


def needs_safety(program: QramProgram) -> bool:
    return any(isinstance(ins, INDIRECT_FORMS + QUANTUM_FORMS) for ins in program) and not is_guarded(program)


def compile_qram_to_qrasp(program: QramProgram, ensure_safe: bool = True) -> QraspImage:
    """Instruction-by-instruction lowering; QRAM register ``i`` lives in cell ``i + delta``.

    Unless ``ensure_safe`` is false, programs that are not statically
    guarded are first passed through :func:`make_address_safe`.
    """
    if ensure_safe and needs_safety(program):
        program = make_address_safe(program)
    lab = LabelMap.for_program(program)
    d = lab.delta
    LOD, ADD, SUB, STO, BPA, RD, PRI, CNOT, HH, TT, MEA = (
        OPCODES[k] for k in ("LOD", "ADD", "SUB", "STO", "BPA", "RD", "PRI", "CNOT", "H", "T", "MEA")
    )
    cells: list[int] = []
    for pos, ins in enumerate(program):
        base = lab(pos)
        if isinstance(ins, LoadConst):
            code = [LOD, ins.c, STO, ins.i + d]
        elif isinstance(ins, (Add, Sub)):
            code = [LOD, 0, ADD, ins.j + d, ADD if isinstance(ins, Add) else SUB, ins.k + d, STO, ins.i + d]
        elif isinstance(ins, LoadIndirect):
            a = base + 8
            code = [LOD, d, ADD, ins.j + d, STO, a + 1, LOD, 0, ADD, 0, STO, ins.i + d]
        elif isinstance(ins, StoreIndirect):
            a = base + 10
            code = [LOD, d, ADD, ins.i + d, STO, a + 1, LOD, 0, ADD, ins.j + d, STO, 0]
        elif isinstance(ins, Tra):
            code = [LOD, 0, ADD, ins.j + d, BPA, lab(ins.m)]
        elif isinstance(ins, Read):
            code = [RD, ins.i + d]
        elif isinstance(ins, Write):
            code = [PRI, ins.i + d]
        elif isinstance(ins, Cnot):
            a = base + 12
            code = [LOD, d, ADD, ins.i + d, STO, a + 1, LOD, d, ADD, ins.j + d, STO, a + 2, CNOT, 0, 0]
        elif isinstance(ins, (H, T)):
            a = base + 6
            code = [LOD, d, ADD, ins.i + d, STO, a + 1, HH if isinstance(ins, H) else TT, 0]
        elif isinstance(ins, Measure):
            a = base + 6
            code = [LOD, d, ADD, ins.j + d, STO, a + 1, MEA, 0, STO, ins.i + d]
        else:
            raise TypeError(ins)
        assert len(code) == simulating_length(ins)
        cells += code
    return QraspImage(tuple(cells))


# --------------------------------------------------------------------------
# QRASP -> QRAM: an interpreter loop with the image hard-coded into memory

TMP0, TMP1, RES, IC, AC, FLAG, OP, J, K = range(9)
MEMORY_OFFSET = 9
LINE5 = "fetch"


class _Builder:
    def __init__(self) -> None:
        self.code: list = []
        self.labels: dict[str, int] = {}
        self._n = 0

    def fresh(self, stem: str) -> str:
        self._n += 1
        return f"{stem}{self._n}"

    def mark(self, name: str) -> None:
        self.labels[name] = len(self.code)

    def emit(self, *ins) -> None:
        self.code.extend(ins)

    def jump(self, target: str, reg: int) -> None:
        self.code.append(("tra", target, reg))

    def move(self, dst: int, src: int) -> None:
        self.emit(LoadConst(dst, 0), Add(dst, dst, src))

    def equal_check(self, a: int, b: int | None = None, const: int | None = None) -> None:
        """``res <- |a - b|`` with the temporaries tmp0 and tmp1."""
        self.move(TMP0, a)
        if const is not None:
            self.emit(LoadConst(TMP1, const))
        else:
            self.move(TMP1, b)
        self.emit(Sub(TMP0, TMP0, TMP1))
        done = self.fresh("abs")
        self.jump(done, TMP0)
        self.emit(LoadConst(TMP1, 0), Sub(TMP0, TMP1, TMP0))
        self.mark(done)
        self.move(RES, TMP0)

    def goto(self, target: str) -> None:
        self.emit(LoadConst(RES, 1))
        self.jump(target, RES)

    def memory_address(self, reg: int, offset: int) -> None:
        """``reg <- IC + offset``."""
        self.move(reg, IC)
        if offset:
            self.emit(LoadConst(TMP0, offset), Add(reg, reg, TMP0))

    def probe(self, reg: int) -> None:
        """Halt when ``reg`` is negative, then turn it into the memory register index."""
        self.emit(
            LoadIndirect(TMP1, reg),
            LoadConst(TMP0, MEMORY_OFFSET),
            Add(reg, reg, TMP0),
        )

    def load_memory(self, dst: int, reg: int) -> None:
        """``dst <- memory[X_reg]`` (clobbers ``reg``)."""
        self.probe(reg)
        self.emit(LoadIndirect(dst, reg))

    def advance(self, n: int) -> None:
        self.emit(LoadConst(TMP0, n), Add(IC, IC, TMP0))

    def build(self) -> QramProgram:
        end = len(self.code)
        self.labels.setdefault("end", end)
        out = []
        for ins in self.code:
            if isinstance(ins, tuple):
                _, target, reg = ins
                out.append(Tra(self.labels[target], reg))
            else:
                out.append(ins)
        return QramProgram(tuple(out))


def _operand(b: _Builder, dst: int, offset: int) -> None:
    """``dst <- memory[IC + offset]``."""
    b.memory_address(dst, offset)
    b.load_memory(dst, dst)


def compile_qrasp_to_qram(img: QraspImage) -> QramProgram:
    """QRAM that interprets ``img`` with a fetch/decode/execute loop.

    Registers 0..8 hold tmp0, tmp1, res, IC, AC, flag, op, j, k; QRASP cell
    ``j`` lives in register ``j + 9``.  Every memory access first probes
    ``X[j]`` so that a negative ``j`` halts the QRAM exactly where the QRASP
    would halt.
    """
    return _interpreter(img).build()


def line5_label(img: QraspImage) -> int:
    """Index of the fetch step (first statement of the loop body) in the compiled program."""
    b = _interpreter(img)
    b.build()
    return b.labels[LINE5]


def _interpreter(img: QraspImage) -> _Builder:
    b = _Builder()
    for n, v in enumerate(img.cells):
        b.emit(LoadConst(MEMORY_OFFSET + n, v))
    b.mark("loop")
    b.equal_check(FLAG, const=0)
    b.jump("end", RES)
    b.mark(LINE5)
    _operand(b, OP, 0)

    def case(code: int, body) -> None:
        nxt = b.fresh("case")
        b.equal_check(OP, const=code)
        b.jump(nxt, RES)
        body()
        b.goto("endif")
        b.mark(nxt)

    def lod():
        _operand(b, J, 1)
        b.move(AC, J)
        b.advance(2)

    def arith(form):
        def body():
            _operand(b, J, 1)
            b.load_memory(RES, J)
            b.emit(form(AC, AC, RES))
            b.advance(2)
        return body

    def sto():
        _operand(b, J, 1)
        b.probe(J)
        b.emit(StoreIndirect(J, AC))
        b.advance(2)

    def bpa():
        taken = b.fresh("taken")
        join = b.fresh("join")
        b.jump(taken, AC)
        b.advance(2)
        b.goto(join)
        b.mark(taken)
        _operand(b, J, 1)
        b.emit(LoadIndirect(TMP1, J))
        b.move(IC, J)
        b.mark(join)

    def rd():
        _operand(b, J, 1)
        b.probe(J)
        b.emit(Read(RES), StoreIndirect(J, RES))
        b.advance(2)

    def pri():
        _operand(b, J, 1)
        b.load_memory(RES, J)
        b.emit(Write(RES))
        b.advance(2)

    def cnot():
        _operand(b, K, 2)
        _operand(b, J, 1)
        b.emit(Cnot(J, K))
        b.advance(3)

    def gate(form):
        def body():
            _operand(b, J, 1)
            b.emit(form(J))
            b.advance(2)
        return body

    def mea():
        _operand(b, J, 1)
        b.emit(Measure(AC, J))
        b.advance(2)

    case(1, lod)
    case(2, arith(Add))
    case(3, arith(Sub))
    case(4, sto)
    case(5, bpa)
    case(6, rd)
    case(7, pri)
    case(8, cnot)
    case(9, gate(H))
    case(10, gate(T))
    case(11, mea)
    b.emit(LoadConst(FLAG, 1))
    b.mark("endif")
    b.goto("loop")
    return b


# --------------------------------------------------------------------------
# lockstep agreement


@dataclass
class AgreementReport:
    checkpoints: int = 0
    mismatches: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _shifted(psi: QState, delta: int) -> QState:
    vec = {}
    for mask, a in psi.vector.items():
        new = 0
        q = 0
        while mask:
            if mask & 1:
                new |= 1 << (q + delta)
            mask >>= 1
            q += 1
        vec[new] = a
    return QState(vec, {q + delta for q in psi.allocated}, psi.scale, psi.mode)


def _single(branches):
    if len(branches) != 1:
        raise ValueError("lockstep agreement is defined here for deterministic runs only")
    return branches[0][2]


def check_qram_to_qrasp_agreement(
    program: QramProgram, inputs: Sequence[int], model: CostModel = CostModel.LOGARITHMIC, max_steps: int = 100_000
) -> AgreementReport:
    """Run ``program`` and its compiled image side by side, comparing at label boundaries."""
    img = compile_qram_to_qrasp(program, ensure_safe=False)
    lab = LabelMap.for_program(program)
    d = lab.delta
    boundaries = set(lab.labels)
    src = RunState(0, {}, QState.zero(), tuple(inputs))
    tgt = RunState(0, img.memory(), QState.zero(), tuple(inputs))
    rep = AgreementReport()
    for _ in range(max_steps):
        _compare_qram(src, tgt, lab, d, rep)
        if src.ic is None or not rep.ok:
            break
        src = _single(exec_qram(src, program, model))
        tgt = _single(exec_qrasp(tgt, model))
        while tgt.ic is not None and tgt.ic not in boundaries:
            tgt = _single(exec_qrasp(tgt, model))
    return rep


def _compare_qram(src: RunState, tgt: RunState, lab: LabelMap, d: int, rep: AgreementReport) -> None:
    rep.checkpoints += 1
    where = f"checkpoint {rep.checkpoints}"
    if src.ic is None:
        if tgt.ic is not None:
            rep.mismatches.append(f"{where}: source halted, target at {tgt.ic}")
    elif src.ic < len(lab.labels) and tgt.ic != lab(src.ic):
        rep.mismatches.append(f"{where}: IC {tgt.ic} != label({src.ic})")
    for i in set(src.mu) | {k - d for k in tgt.mu if k >= d}:
        if src.mu.get(i, 0) != tgt.mu.get(i + d, 0):
            rep.mismatches.append(f"{where}: register {i}")
    if not _shifted(src.psi, d).same_state(tgt.psi):
        rep.mismatches.append(f"{where}: quantum state")
    if src.out != tgt.out or src.pos != tgt.pos:
        rep.mismatches.append(f"{where}: tapes")


def check_qrasp_to_qram_agreement(
    img: QraspImage, inputs: Sequence[int], model: CostModel = CostModel.LOGARITHMIC, max_steps: int = 100_000
) -> AgreementReport:
    """Run ``img`` and its interpreter side by side, comparing at each fetch."""
    program = compile_qrasp_to_qram(img)
    fetch = line5_label(img)
    src = RunState(0, img.memory(), QState.zero(), tuple(inputs))
    tgt = RunState(0, {}, QState.zero(), tuple(inputs))
    rep = AgreementReport()

    def to_checkpoint(st: RunState) -> RunState:
        while st.ic is not None and st.ic != fetch:
            st = _single(exec_qram(st, program, model))
        return st

    tgt = to_checkpoint(tgt)
    for _ in range(max_steps):
        _compare_qrasp(src, tgt, rep)
        if src.ic is None or not rep.ok:
            break
        src = _single(exec_qrasp(src, model))
        tgt = _single(exec_qram(tgt, program, model))
        tgt = to_checkpoint(tgt)
    return rep


def _compare_qrasp(src: RunState, tgt: RunState, rep: AgreementReport) -> None:
    rep.checkpoints += 1
    where = f"checkpoint {rep.checkpoints}"
    mu = tgt.mu
    if src.ic is None:
        if tgt.ic is not None and mu.get(FLAG, 0) != 1:
            rep.mismatches.append(f"{where}: source halted, target running")
    elif mu.get(IC, 0) != src.ic:
        rep.mismatches.append(f"{where}: IC {mu.get(IC, 0)} != {src.ic}")
    if mu.get(AC, 0) != src.ac:
        rep.mismatches.append(f"{where}: AC")
    for j in set(src.mu) | {k - MEMORY_OFFSET for k in mu if k >= MEMORY_OFFSET}:
        if src.mu.get(j, 0) != mu.get(j + MEMORY_OFFSET, 0):
            rep.mismatches.append(f"{where}: memory[{j}]")
    if not src.psi.same_state(tgt.psi):
        rep.mismatches.append(f"{where}: quantum state")
    if src.out != tgt.out or src.pos != tgt.pos:
        rep.mismatches.append(f"{where}: tapes")
