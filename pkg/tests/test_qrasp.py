import pytest
from hypothesis import given
from hypothesis import strategies as st

from qramkit.cost import CostModel, l
from qramkit.qram import ProgramError
from qramkit.qrasp import (
    OPCODES,
    QraspConfig,
    QraspImage,
    assemble_qrasp,
    disassemble,
    format_image,
    initial_config,
    parse_image,
    qrasp_step,
)
from qramkit.qstate import H, QState, apply_gate
from qramkit.ring import RealQ2

from corpus import qrasp_corpus

LOG = CostModel.LOGARITHMIC


@pytest.mark.parametrize(
    "text, cells",
    [("LOD, 7", [1, 7]), ("CNOT, 2, 3", [8, 2, 3]), ("MEA, 0", [11, 0]), ("HLT", [0]), ("5 -6 7", [5, -6, 7])],
)
def test_assemble(text, cells):
    assert list(assemble_qrasp(text)) == cells


def test_labels_are_cell_addresses():
    img = assemble_qrasp("LOD, x\nCNOT, 1, 2\nx: 42")
    assert img.cells == (1, 5, 8, 1, 2, 42)


@pytest.mark.parametrize("text", ["FOO, 1", "LOD", "CNOT, 1", "HLT, 3", "LOD, nowhere"])
def test_assemble_errors(text):
    with pytest.raises(ProgramError):
        assemble_qrasp(text)


@pytest.mark.parametrize("name, img", sorted(qrasp_corpus().items()))
def test_image_and_listing_round_trip(name, img):
    assert parse_image(format_image(img)) == img
    assert assemble_qrasp(disassemble(img)) == img


def test_step_lod():
    c = initial_config(QraspImage([1, 7]), [])
    ((p, t, c1),) = qrasp_step(c, LOG)
    assert (p, t, c1.ic, c1.ac) == (1, l(0) + l(7), 2, 7)


def test_step_bad_opcode_halts():
    c = initial_config(QraspImage([99, 3]), [])
    ((_, t, c1),) = qrasp_step(c, LOG)
    assert c1.terminal and t == l(0) + l(99)


def test_step_measure_branches():
    psi = apply_gate(QState.zero(), H(0))
    c = QraspConfig(0, 5, {0: 11, 1: 0}, psi)
    br = qrasp_step(c, LOG)
    assert [p for p, _, _ in br] == [RealQ2(1) / 2, RealQ2(1) / 2]
    assert [s.ac for _, _, s in br] == [0, 1]


def test_bpa_negative_target_halts():
    c = QraspConfig(0, 1, {0: 5, 1: -3}, QState.zero())
    ((_, _, c1),) = qrasp_step(c, LOG)
    assert c1.terminal


def test_initial_memory_is_padded_image():
    img = QraspImage([1, 0, 4, 9])
    c = initial_config(img, [])
    assert [c.cell(i) for i in range(6)] == [1, 0, 4, 9, 0, 0]


def test_self_modified_opcode_is_decoded():
    # STO rewrites the upcoming T into an H, which makes the measurement random
    img = assemble_qrasp("LOD, 9\nSTO, slot\nslot: T, 0\nMEA, 0\nHLT")
    c = initial_config(img, [])
    for _ in range(3):
        ((_, _, c),) = qrasp_step(c, LOG)
    assert c.cell(4) == OPCODES["H"]
    assert len(qrasp_step(c, LOG)) == 2


@given(st.lists(st.integers(-3, 14), min_size=1, max_size=12), st.integers(-2, 2))
def test_branch_probabilities_sum_to_one(cells, ac):
    c = QraspConfig(0, ac, dict(enumerate(cells)), apply_gate(QState.zero(), H(0)))
    total = sum((p for p, _, _ in qrasp_step(c, LOG)), RealQ2(0))
    assert total == RealQ2(1)
