import math
from fractions import Fraction

import pytest

from qramkit.cost import CostModel
from qramkit.engine import (
    BOTTOM,
    IoAlphabet,
    compare_distributions,
    decode_output,
    encode_input,
    enumerate_paths,
    format_distribution,
    parse_distribution,
    sample,
)
from qramkit.qram import parse_qram
from qramkit.ring import RealQ2

from corpus import INPUTS, qram_corpus, qrasp_corpus

HALF = RealQ2(Fraction(1, 2))
CORPUS = [(f"qram/{k}", v) for k, v in qram_corpus().items()] + [(f"qrasp/{k}", v) for k, v in qrasp_corpus().items()]


def test_encode_input():
    assert encode_input("0101") == (0, 1, 0, 1)
    assert encode_input("") == ()
    assert encode_input("ba", IoAlphabet(("a", "b"))) == (1, 0)
    with pytest.raises(ValueError):
        encode_input("2")


def test_decode_output():
    assert decode_output((0, 1, 2, 3)) == "0111"
    assert decode_output(()) == ""
    assert decode_output((-5,)) == "1"


def test_write_x0():
    rep = enumerate_paths(parse_qram("WRITE X0"), "")
    assert rep.distribution == {"0": RealQ2(1)}
    assert rep.worst_case_time == 2  # l(X0) = 1 for the write, 1 for stepping past the end


def test_coin_and_bell():
    c = qram_corpus()
    assert enumerate_paths(c["coin"]).distribution == {"0": HALF, "1": HALF}
    assert enumerate_paths(c["bell"]).distribution == {"00": HALF, "11": HALF}


def test_compare_distributions():
    d = {"0": HALF, "1": HALF}
    assert compare_distributions(d, d) == (True, RealQ2(0))
    ok, gap = compare_distributions(d, {"0": RealQ2(1)})
    assert not ok and gap == HALF
    ok, gap = compare_distributions({"0": 0.5}, {"0": 0.5 + 1e-12})
    assert ok


@pytest.mark.parametrize("name, m", CORPUS)
def test_halting_mass_is_one(name, m):
    for x in INPUTS:
        rep = enumerate_paths(m, x)
        assert rep.halted_mass == RealQ2(1)
        assert rep.total() == RealQ2(1)


@pytest.mark.parametrize("name, m", CORPUS)
def test_worst_time_bound_is_stable(name, m):
    for x in INPUTS[:3]:
        rep = enumerate_paths(m, x)
        bound = rep.max_path_steps
        a = enumerate_paths(m, x, max_steps=bound)
        b = enumerate_paths(m, x, max_steps=2 * bound + 1)
        assert a.distribution == b.distribution and a.worst_case_time == b.worst_case_time


def test_cut_off_mass_is_reported():
    loop = parse_qram("X1 <- 1\nL: TRA L IF X1 > 0")
    rep = enumerate_paths(loop, max_steps=20)
    assert rep.exceeded and rep.halted_mass == RealQ2(0)
    assert sample(loop, max_steps=20, shots=3) == {BOTTOM: 1.0}


def test_path_count_bounded_by_measurements():
    rep = enumerate_paths(qrasp_corpus()["three_coins"])
    assert rep.path_count == 8


def test_float_mode_agrees():
    for name, m in CORPUS:
        ex = enumerate_paths(m, "1", mode="exact").distribution
        fl = enumerate_paths(m, "1", mode="float").distribution
        assert set(ex) == set(fl)
        assert all(abs(float(ex[k]) - fl[k]) < 1e-9 for k in ex), name


def test_sampling_is_reproducible():
    coin = qram_corpus()["coin"]
    assert sample(coin, seed=7, shots=500) == sample(coin, seed=7, shots=500)
    assert sample(qram_corpus()["hzh"], shots=50) == {"1": 1.0}


def test_fair_coin_within_five_sigma():
    n = 10_000
    freq = sample(qram_corpus()["coin"], seed=1, shots=n)
    assert abs(freq["0"] - 0.5) < 5 * math.sqrt(0.25 / n)


@pytest.mark.parametrize("machine", [qram_corpus()["bell"], qrasp_corpus()["three_coins"], qram_corpus()["remeasure"]])
def test_sampling_converges(machine):
    exact = enumerate_paths(machine).distribution
    emp = sample(machine, seed=3, shots=100_000, mode="float")
    tv = 0.5 * sum(abs(float(exact.get(k, 0)) - emp.get(k, 0.0)) for k in set(exact) | set(emp))
    assert tv < 0.02


def test_cost_models_differ_only_in_time():
    m = qram_corpus()["count_ones"]
    a = enumerate_paths(m, "1101", CostModel.CONSTANT)
    b = enumerate_paths(m, "1101", CostModel.LOGARITHMIC)
    assert a.distribution == b.distribution
    assert a.worst_case_time <= b.worst_case_time


def test_distribution_text_round_trip():
    d = enumerate_paths(qrasp_corpus()["three_coins"]).distribution
    assert parse_distribution(format_distribution(d)) == d
