"""QRASP memory images, a mnemonic assembler and the step relation."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from .cost import CostModel, l
from .qram import ProgramError, RunState, _measure
from .qstate import CNOT, H, T, Probability, QState, apply_gate, arith

OPCODES: dict[str, int] = {
    "LOD": 1,
    "ADD": 2,
    "SUB": 3,
    "STO": 4,
    "BPA": 5,
    "RD": 6,
    "PRI": 7,
    "CNOT": 8,
    "H": 9,
    "T": 10,
    "MEA": 11,
}
MNEMONICS = {v: k for k, v in OPCODES.items()}
HALT = 0


def operand_count(opcode: int) -> int:
    return 2 if opcode == OPCODES["CNOT"] else 1


@dataclass(frozen=True)
class QraspImage:
    cells: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", tuple(int(c) for c in self.cells))

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def __getitem__(self, idx):
        return self.cells[idx]

    def memory(self) -> dict[int, int]:
        return {i: c for i, c in enumerate(self.cells) if c != 0}


_LABEL = re.compile(r"^([A-Za-z_]\w*)\s*:\s*(.*)$")
_INT = re.compile(r"^[+-]?\d+$")


def assemble_qrasp(text: str) -> QraspImage:
    """Two-pass assembler: mnemonics, ``HLT``, raw integers and ``name:`` labels.

    Labels name cell addresses and may appear as operands, which makes
    self-modifying code readable.  ``;`` separates statements on one line.
    """
    stmts: list[tuple[int, list[str]]] = []
    labels: dict[str, int] = {}
    addr = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        for piece in raw.split("#", 1)[0].split(";"):
            line = piece.strip()
            while True:
                m = _LABEL.match(line)
                if not m:
                    break
                if m[1] in labels:
                    raise ProgramError(f"line {lineno}: duplicate label {m[1]!r}")
                labels[m[1]] = addr
                line = m[2].strip()
            if not line:
                continue
            toks = [t for t in re.split(r"[,\s]+", line) if t]
            stmts.append((lineno, toks))
            addr += _width(toks, lineno)

    cells: list[int] = []
    for lineno, toks in stmts:
        head = toks[0]
        if _INT.match(head):
            cells.extend(_value(t, labels, lineno) for t in toks)
            continue
        name = head.upper()
        if name == "HLT":
            cells.append(HALT)
            continue
        cells.append(OPCODES[name])
        cells.extend(_value(t, labels, lineno) for t in toks[1:])
    return QraspImage(tuple(cells))


def _width(toks: list[str], lineno: int) -> int:
    head = toks[0]
    if _INT.match(head):
        for t in toks[1:]:
            if not _INT.match(t):
                raise ProgramError(f"line {lineno}: expected integer, got {t!r}")
        return len(toks)
    name = head.upper()
    if name == "HLT":
        if len(toks) != 1:
            raise ProgramError(f"line {lineno}: HLT takes no operands")
        return 1
    if name not in OPCODES:
        raise ProgramError(f"line {lineno}: unknown mnemonic {head!r}")
    want = operand_count(OPCODES[name])
    if len(toks) - 1 != want:
        raise ProgramError(f"line {lineno}: {name} expects {want} operand(s), got {len(toks) - 1}")
    return 1 + want


def _value(tok: str, labels: Mapping[str, int], lineno: int) -> int:
    if _INT.match(tok):
        return int(tok)
    m = re.match(r"^([A-Za-z_]\w*)([+-]\d+)?$", tok)
    if m and m[1] in labels:
        return labels[m[1]] + (int(m[2]) if m[2] else 0)
    raise ProgramError(f"line {lineno}: unresolved operand {tok!r}")


def parse_image(text: str) -> QraspImage:
    """Whitespace-separated integer image (``.qri``); ``#`` starts a comment."""
    vals = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        for tok in raw.split("#", 1)[0].replace(",", " ").split():
            if not _INT.match(tok):
                raise ProgramError(f"line {lineno}: not an integer: {tok!r}")
            vals.append(int(tok))
    return QraspImage(tuple(vals))


def format_image(img: QraspImage) -> str:
    return " ".join(map(str, img.cells)) + "\n"


def disassemble(img: QraspImage) -> str:
    """Linear-sweep listing; ``assemble_qrasp(disassemble(img)) == img``."""
    lines = []
    i, cells = 0, img.cells
    while i < len(cells):
        op = cells[i]
        if op in MNEMONICS and i + operand_count(op) < len(cells):
            args = cells[i + 1 : i + 1 + operand_count(op)]
            lines.append(f"{MNEMONICS[op]}, " + ", ".join(map(str, args)))
            i += 1 + len(args)
        elif op == HALT:
            lines.append("HLT")
            i += 1
        else:
            lines.append(str(op))
            i += 1
    return "".join(s + "\n" for s in lines)


# --------------------------------------------------------------------------
# configurations and the step relation


@dataclass(frozen=True)
class QraspConfig:
    """``(xi, zeta, mu, psi, x, y)``; ``ic is None`` marks termination."""

    ic: int | None
    ac: int
    mu: Mapping[int, int]
    psi: QState
    x: tuple[int, ...] = ()
    y: tuple[int, ...] = ()

    @property
    def terminal(self) -> bool:
        return self.ic is None

    def cell(self, i: int) -> int:
        return self.mu.get(i, 0)


def initial_config(img: QraspImage, inputs: Iterable[int], mode: str | None = None) -> QraspConfig:
    return QraspConfig(0, 0, img.memory(), QState.zero(mode), tuple(inputs), ())


def exec_qrasp(st: RunState, model: CostModel) -> list[tuple[Probability, int, RunState]]:
    """Advance ``st`` by one transition in place, forking on measurement."""
    one = arith(st.psi.mode).prob_one
    xi = st.ic
    if xi is None:
        raise ValueError("terminal configuration has no successor")
    mu = st.mu
    g = mu.get
    op = g(xi, 0)
    if not 1 <= op <= 11:
        st.ic = None
        return [(one, l(xi, model) + l(op, model), st)]
    j = g(xi + 1, 0)
    base = l(xi, model) + l(j, model)
    if op == 1:
        st.ac = j
        st.ic = xi + 2
        return [(one, base, st)]
    if op == 5:
        zeta = st.ac
        if zeta > 0:
            st.ic = j if j >= 0 else None
            return [(one, base + l(zeta, model), st)]
        st.ic = xi + 2
        return [(one, l(xi, model) + l(zeta, model), st)]
    if j < 0:
        st.ic = None
        if st.mon is not None:
            st.mon.invalid_halts += 1
        return [(one, base, st)]
    if op in (2, 3):
        zeta = st.ac
        v = g(j, 0)
        st.ac = zeta + v if op == 2 else zeta - v
        st.ic = xi + 2
        return [(one, base + l(zeta, model) + l(v, model), st)]
    if op == 4:
        mu[j] = st.ac
        st.ic = xi + 2
        return [(one, base + l(st.ac, model), st)]
    if op == 6:
        a = st.read_input()
        mu[j] = a
        st.ic = xi + 2
        return [(one, base + l(a, model), st)]
    if op == 7:
        v = g(j, 0)
        st.out.append(v)
        st.ic = xi + 2
        return [(one, base + l(v, model), st)]
    if op == 8:
        k = g(xi + 2, 0)
        if k < 0 or k == j:
            st.ic = None
            if st.mon is not None:
                st.mon.invalid_halts += 1
            return [(one, base, st)]
        st.psi = apply_gate(st.psi, CNOT(j, k))
        st.ic = xi + 3
        return [(one, base + l(k, model), st)]
    if op in (9, 10):
        st.psi = apply_gate(st.psi, H(j) if op == 9 else T(j))
        st.ic = xi + 2
        return [(one, base, st)]
    # op == 11
    st.ic = xi + 2

    def store(s: RunState, outcome: int) -> None:
        s.ac = outcome

    return _measure(st, j, store, base)


def _to_state(c: QraspConfig) -> RunState:
    return RunState(c.ic, dict(c.mu), c.psi, c.x, 0, list(c.y), c.ac)


def _to_config(st: RunState) -> QraspConfig:
    mu = {k: v for k, v in st.mu.items() if v != 0}
    return QraspConfig(st.ic, st.ac, mu, st.psi, tuple(st.inp[st.pos :]), tuple(st.out))


def qrasp_step(c: QraspConfig, model: CostModel = CostModel.LOGARITHMIC):
    """All successors of ``c`` as ``[(probability, time, config), ...]``."""
    if c.terminal:
        raise ValueError("terminal configuration has no successor")
    return [(p, t, _to_config(s)) for p, t, s in exec_qrasp(_to_state(c), model)]
