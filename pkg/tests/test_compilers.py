import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qramkit.compilers import (
    MEMORY_OFFSET,
    SIMULATING_LENGTHS,
    LabelMap,
    check_qram_to_qrasp_agreement,
    check_qrasp_to_qram_agreement,
    compile_qram_to_qrasp,
    compile_qrasp_to_qram,
    needs_safety,
    simulating_length,
)
from qramkit.cost import CostModel
from qramkit.engine import compare_distributions, enumerate_paths, encode_input
from qramkit.qram import Cnot, H, Measure, QramProgram, Read, Tra, Write
from qramkit.qrasp import OPCODES, QraspImage, assemble_qrasp
from qramkit.ring import RealQ2

from corpus import INPUTS, counting_loop, qram_corpus, qrasp_corpus


def agree(a, b, x, model=CostModel.LOGARITHMIC):
    ra, rb = enumerate_paths(a, x, model), enumerate_paths(b, x, model)
    return compare_distributions(ra.distribution, rb.distribution)[0]


@pytest.mark.parametrize("ins, n", [(Tra(0, 1), 6), (Measure(1, 2), 10), (Read(3), 2)])
def test_simulating_length_examples(ins, n):
    assert simulating_length(ins) == n


def test_cnot_occupies_fifteen_cells():
    img = compile_qram_to_qrasp(QramProgram([Cnot(1, 2)]), ensure_safe=False)
    assert len(img) == 15 and img[12] == OPCODES["CNOT"]


def test_h_lowering():
    prog = QramProgram([Write(0), H(3)])
    lab = LabelMap.for_program(prog)
    d = lab.delta
    img = compile_qram_to_qrasp(prog, ensure_safe=False)
    a = lab(1) + 6
    assert img.cells[lab(1) :] == (OPCODES["LOD"], d, OPCODES["ADD"], 3 + d, OPCODES["STO"], a + 1, OPCODES["H"], 0)


@pytest.mark.parametrize("name, p", sorted(qram_corpus().items()))
def test_label_map_structure(name, p):
    lab = LabelMap.for_program(p)
    assert all(a < b for a, b in zip(lab.labels, lab.labels[1:])) or len(p) == 0
    assert lab.delta == 20 * len(p)
    assert lab.total <= 15 * len(p) <= lab.delta


def test_illegal_opcode_image():
    img = QraspImage([99])
    q = compile_qrasp_to_qram(img)
    assert enumerate_paths(img).distribution == enumerate_paths(q).distribution == {"": RealQ2(1)}


def test_small_store_print_program():
    img = assemble_qrasp("LOD, 1\nSTO, 20\nPRI, 20\nHLT")
    assert enumerate_paths(compile_qrasp_to_qram(img)).distribution == {"1": RealQ2(1)}


def test_measured_hadamard_image():
    img = assemble_qrasp("H, 0\nMEA, 0\nSTO, 9\nPRI, 9\nHLT")
    half = RealQ2(1) / 2
    assert enumerate_paths(compile_qrasp_to_qram(img)).distribution == {"0": half, "1": half}


@pytest.mark.parametrize("name, p", sorted(qram_corpus().items()))
def test_qram_to_qrasp_distributions(name, p):
    img = compile_qram_to_qrasp(p)
    for x in INPUTS:
        assert agree(p, img, x)


@pytest.mark.parametrize("name, img", sorted(qrasp_corpus().items()))
def test_qrasp_to_qram_distributions(name, img):
    q = compile_qrasp_to_qram(img)
    for x in INPUTS:
        assert agree(img, q, x)


def test_unsafe_programs_are_guarded_first():
    p = qram_corpus()["bad_address"]
    assert needs_safety(p)
    assert agree(p, compile_qram_to_qrasp(p), "")


@pytest.mark.parametrize("name", ["sum", "echo", "indirect", "count_ones"])
def test_lockstep_agreement_qram_to_qrasp(name):
    p = qram_corpus()[name]
    rep = check_qram_to_qrasp_agreement(p, encode_input("101"))
    assert rep.ok and rep.checkpoints > len(p) // 2, rep.mismatches


@pytest.mark.parametrize("name", ["sum", "sub", "echo", "patch_operand", "count_ones"])
def test_lockstep_agreement_qrasp_to_qram(name):
    img = qrasp_corpus()[name]
    rep = check_qrasp_to_qram_agreement(img, encode_input("011"))
    assert rep.ok and rep.checkpoints > 3, rep.mismatches


def test_interpreter_hardcodes_memory_at_offset():
    img = assemble_qrasp("PRI, 3\nHLT\n77")
    q = compile_qrasp_to_qram(img)
    loads = {(ins.i, ins.c) for ins in q if type(ins).__name__ == "LoadConst"}
    assert (MEMORY_OFFSET + 3, 77) in loads


@pytest.mark.parametrize("model", list(CostModel))
def test_linear_overhead(model):
    p = counting_loop()
    img = compile_qram_to_qrasp(p)
    back = compile_qrasp_to_qram(img)
    fwd, rev = [], []
    for n in range(1, 33):
        x = "1" * n
        t_src = enumerate_paths(p, x, model).worst_case_time
        t_img = enumerate_paths(img, x, model).worst_case_time
        fwd.append(t_img / t_src)
        rev.append(enumerate_paths(back, x, model).worst_case_time / t_img)
    for ratios in (fwd, rev):
        assert max(ratios) <= 1.5 * ratios[7]


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["H, 0", "T, 0", "H, 1", "CNOT, 0, 1", "CNOT, 1, 0", "T, 1"]), max_size=8),
       st.sampled_from([0, 1]))
def test_random_gate_images(body, q):
    img = assemble_qrasp("\n".join(body + [f"MEA, {q}", "STO, 99", "PRI, 99", "HLT"]))
    assert agree(img, compile_qrasp_to_qram(img), "")


def test_table_covers_every_form():
    assert len(SIMULATING_LENGTHS) == 12
