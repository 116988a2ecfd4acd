import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qramkit.qstate import CNOT, H, T, QState, apply_gate, measure_qubit
from qramkit.ring import RealQ2

S = 1 / math.sqrt(2)
HM = np.array([[1, 1], [1, -1]]) * S
TM = np.diag([1, np.exp(1j * np.pi / 4)])


def dense(state: QState, n: int) -> np.ndarray:
    v = np.zeros(1 << n, dtype=complex)
    for mask, a in state.amplitudes_by_mask().items():
        v[mask] = a
    return v


def dense_gate(v: np.ndarray, n: int, gate) -> np.ndarray:
    """Reference: bit ``q`` of the index is qubit ``q``."""
    psi = v.reshape((2,) * n)  # axis n-1-q is qubit q
    ax = lambda q: n - 1 - q  # noqa: E731
    if gate.name == "CNOT":
        i, j = gate.qubits
        out = psi.copy()
        idx1 = [slice(None)] * n
        idx1[ax(i)] = 1
        sub = out[tuple(idx1)]
        jj = ax(j) - (1 if ax(j) > ax(i) else 0)
        out[tuple(idx1)] = np.flip(sub, axis=jj)
        return out.reshape(-1)
    m = HM if gate.name == "H" else TM
    (q,) = gate.qubits
    out = np.tensordot(m, psi, axes=([1], [ax(q)]))
    return np.moveaxis(out, 0, ax(q)).reshape(-1)


def test_h_on_zero():
    s = apply_gate(QState.zero(), H(0))
    assert s.amplitudes() == pytest.approx({"0": S, "1": S})


def test_t_after_h():
    s = apply_gate(apply_gate(QState.zero(), H(0)), T(0))
    a = s.amplitudes()
    assert a["0"] == pytest.approx(S)
    assert a["1"] == pytest.approx(np.exp(1j * np.pi / 4) * S)


def test_cnot_against_dense():
    s = apply_gate(QState.zero(), H(1))  # (|00> + |10>)/sqrt2 with qubit 1 leading
    s = apply_gate(s, CNOT(1, 0))
    v = dense_gate(dense_gate(np.eye(4)[0], 2, H(1)), 2, CNOT(1, 0))
    assert np.allclose(dense(s, 2), v)


def test_cnot_rejects_equal_wires():
    with pytest.raises(ValueError):
        apply_gate(QState.zero(), CNOT(2, 2))


def test_measure_zero_state():
    (branch,) = measure_qubit(QState.zero(), 0)
    assert branch[0] == RealQ2(1) and branch[1] == 0


def test_measure_plus():
    br = measure_qubit(apply_gate(QState.zero(), H(0)), 0)
    assert [(p, o) for p, o, _ in br] == [(RealQ2(1, 0) / 2, 0), (RealQ2(1, 0) / 2, 1)]
    assert br[0][2].same_state(QState.basis({0: 0}))
    assert br[1][2].same_state(QState.basis({0: 1}))


def test_measure_bell_pair():
    s = apply_gate(apply_gate(QState.zero(), H(0)), CNOT(0, 1))
    br = measure_qubit(s, 1)
    assert [p for p, _, _ in br] == [RealQ2(1) / 2, RealQ2(1) / 2]
    assert br[0][2].same_state(QState.basis({0: 0, 1: 0}))
    assert br[1][2].same_state(QState.basis({0: 1, 1: 1}))


gates = st.one_of(
    st.builds(H, st.integers(0, 5)),
    st.builds(T, st.integers(0, 5)),
    st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda p: p[0] != p[1]).map(lambda p: CNOT(*p)),
)


@settings(max_examples=60, deadline=None)
@given(st.lists(gates, max_size=100))
def test_exact_norm_is_one_and_float_agrees(seq):
    ex, fl = QState.zero("exact"), QState.zero("float")
    v = np.eye(1 << 6)[0].astype(complex)
    for g in seq:
        ex, fl = apply_gate(ex, g), apply_gate(fl, g)
        v = dense_gate(v, 6, g)
    assert ex.norm_sq() == RealQ2(1)
    assert np.allclose(dense(ex, 6), dense(fl, 6), atol=1e-9)
    assert np.allclose(dense(ex, 6), v, atol=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(gates, max_size=30), st.integers(0, 5))
def test_measurement_probabilities_sum_to_one(seq, q):
    s = QState.zero("exact")
    for g in seq:
        s = apply_gate(s, g)
    total = RealQ2(0)
    for p, _, post in measure_qubit(s, q):
        total = total + p
        assert post.norm_sq() == RealQ2(1)
    assert total == RealQ2(1)


@settings(max_examples=100, deadline=None)
@given(st.lists(gates, max_size=30), st.integers(0, 5))
def test_h_squared_is_identity(seq, q):
    s = QState.zero("exact")
    for g in seq:
        s = apply_gate(s, g)
    assert apply_gate(apply_gate(s, H(q)), H(q)).same_state(s)
