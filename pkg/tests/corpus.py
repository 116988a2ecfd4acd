"""Shared program corpora: QRAM assembly and QRASP mnemonics, each with inputs."""
from __future__ import annotations

from qramkit.qram import parse_qram
from qramkit.qrasp import assemble_qrasp

INPUTS = ("", "0", "1", "01", "11")

QRAM_SOURCES: dict[str, str] = {
    "coin": """
        X1 <- 0
        H Q[X1]
        X2 <- M Q[X1]
        WRITE X2
    """,
    "echo": """
        READ X1
        READ X2
        WRITE X2
        WRITE X1
    """,
    "sum": """
        READ X1
        READ X2
        X3 <- X1 + X2
        WRITE X3
    """,
    "diff": """
        READ X1
        READ X2
        X3 <- X1 - X2
        X4 <- 1
        X3 <- X3 + X4
        WRITE X3
    """,
    "indirect": """
        READ X4
        X5 <- 10
        X6 <- X5 + X4
        X7 <- 1
        X8 <- X4 + X7
        X[X6] <- X8
        X9 <- X[X6]
        WRITE X9
    """,
    "bell": """
        X1 <- 0
        X2 <- 1
        H Q[X1]
        CNOT Q[X1] Q[X2]
        X3 <- M Q[X1]
        X4 <- M Q[X2]
        WRITE X3
        WRITE X4
    """,
    "hzh": """
        X1 <- 3
        H Q[X1]
        T Q[X1]
        T Q[X1]
        T Q[X1]
        T Q[X1]
        H Q[X1]
        X2 <- M Q[X1]
        WRITE X2
    """,
    "count_ones": """
        X9 <- 1
        loop: READ X1
        X3 <- X1 + X9
        TRA body IF X3 > 0
        WRITE X5
        TRA end IF X9 > 0
        body: TRA inc IF X1 > 0
        TRA loop IF X9 > 0
        inc: X5 <- X5 + X9
        TRA loop IF X9 > 0
        end:
    """,
    "measure_branch": """
        X9 <- 1
        X1 <- 0
        H Q[X1]
        X2 <- M Q[X1]
        TRA one IF X2 > 0
        WRITE X2
        TRA end IF X9 > 0
        one: WRITE X2
        WRITE X2
        end:
    """,
    "remeasure": """
        X1 <- 2
        H Q[X1]
        X2 <- M Q[X1]
        H Q[X1]
        X3 <- M Q[X1]
        WRITE X2
        WRITE X3
    """,
    "controlled_h": """
        READ X1
        X8 <- 0
        TRA skip IF X1 > 0
        H Q[X8]
        skip: T Q[X8]
        X2 <- M Q[X8]
        WRITE X2
    """,
    "bad_address": """
        X1 <- 0
        X3 <- 1
        X2 <- X1 - X3
        X4 <- X[X2]
        WRITE X4
    """,
}

QRASP_SOURCES: dict[str, str] = {
    "echo": """
        RD, d0
        PRI, d0
        HLT
        d0: 0
    """,
    "coin": """
        H, 0
        MEA, 0
        STO, d0
        PRI, d0
        HLT
        d0: 0
    """,
    "sum": """
        RD, a
        RD, b
        LOD, 0
        ADD, a
        ADD, b
        STO, c
        PRI, c
        HLT
        a: 0; b: 0; c: 0
    """,
    "sub": """
        RD, a
        RD, b
        LOD, 1
        ADD, a
        SUB, b
        STO, c
        PRI, c
        HLT
        a: 0; b: 0; c: 0
    """,
    "measure_branch": """
        H, 1
        MEA, 1
        BPA, one
        PRI, zero
        HLT
        one: PRI, unit
        PRI, unit
        HLT
        zero: 0; unit: 1
    """,
    "bell": """
        H, 0
        CNOT, 0, 1
        MEA, 0
        STO, a
        MEA, 1
        STO, b
        PRI, a
        PRI, b
        HLT
        a: 0; b: 0
    """,
    "hzh": """
        H, 2
        T, 2
        T, 2
        T, 2
        T, 2
        H, 2
        MEA, 2
        STO, a
        PRI, a
        HLT
        a: 0
    """,
    "patch_operand": """
        RD, x
        LOD, 1
        ADD, x
        BPA, ok
        HLT
        ok: LOD, tab
        ADD, x
        STO, slot+1
        slot: PRI, 0
        HLT
        x: 0
        tab: 1; 0
    """,
    "patch_opcode": """
        RD, x
        LOD, 9
        ADD, x
        STO, slot
        slot: T, 0
        MEA, 0
        STO, a
        PRI, a
        HLT
        x: 0; a: 0
    """,
    "count_ones": """
        loop: RD, x
        LOD, 1
        ADD, x
        BPA, cont
        PRI, cnt
        HLT
        cont: LOD, 0
        ADD, x
        BPA, inc
        LOD, 1
        BPA, loop
        inc: LOD, 1
        ADD, cnt
        STO, cnt
        LOD, 1
        BPA, loop
        x: 0; cnt: 0
    """,
    "three_coins": """
        H, 0
        H, 1
        H, 2
        MEA, 0
        STO, a
        MEA, 1
        STO, b
        MEA, 2
        STO, c
        PRI, a
        PRI, b
        PRI, c
        HLT
        a: 0; b: 0; c: 0
    """,
    "negative_branch": """
        LOD, 1
        BPA, -1
        PRI, a
        HLT
        a: 1
    """,
}


def qram_corpus():
    return {name: parse_qram(src) for name, src in QRAM_SOURCES.items()}


def qrasp_corpus():
    return {name: assemble_qrasp(src) for name, src in QRASP_SOURCES.items()}


COUNTING_LOOP = """
    X9 <- 1
    loop: READ X1
    X3 <- X1 + X9
    TRA body IF X3 > 0
    TRA down IF X5 > 0
    TRA end IF X9 > 0
    body: X5 <- X5 + X9
    TRA loop IF X9 > 0
    down: X5 <- X5 - X9
    TRA down IF X5 > 0
    WRITE X5
    end:
"""


def counting_loop():
    """Counts the input symbols up into X5, then back down to zero; ``T(n)`` is linear in ``|x|``."""
    return parse_qram(COUNTING_LOOP)
