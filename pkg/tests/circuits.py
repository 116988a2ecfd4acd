"""Dense circuit oracle and random perturbed circuit pairs."""
import numpy as np

from qramkit.circuit import Unitary, perturbation, random_circuit


def gate_matrix(n, u, wires):
    """Full ``2^n`` matrix of ``u`` on ``wires``, built entry by entry (qubit 0 most significant)."""
    dim = 1 << n
    g = np.zeros((dim, dim), complex)
    k = len(wires)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub = int("".join(str(bits[w]) for w in wires), 2)
        for r in range(1 << k):
            new = list(bits)
            for i, w in enumerate(wires):
                new[w] = (r >> (k - 1 - i)) & 1
            g[int("".join(map(str, new)), 2), col] += u.matrix[r, sub]
    return g


def dense_operator(c):
    op = np.eye(1 << c.n, dtype=complex)
    for gid, wires in c.gates:
        op = gate_matrix(c.n, c.unitaries[gid], wires) @ op
    return op


def dense_distribution(c, x):
    bits = [0] * c.n
    for q, v in c.init.items():
        bits[q] = v
    for q, ch in zip(c.inputs, x):
        bits[q] = int(ch)
    phi = dense_operator(c)[:, int("".join(map(str, bits)), 2)]
    out = {}
    for basis, amp in enumerate(phi):
        y = "".join(str((basis >> (c.n - 1 - q)) & 1) for q in c.outputs)
        out[y] = out.get(y, 0.0) + abs(amp) ** 2
    return out


def perturbed_pair(rng, eps, max_qubits=3, max_depth=6):
    """``(c1, c2, ||U1 - U2||_2)`` where one gate of ``c1`` becomes ``V G`` with ``||V - I||_2 < eps``."""
    n = int(rng.integers(1, max_qubits + 1))
    c1 = random_circuit(n, int(rng.integers(1, max_depth + 1)), rng)
    gid, _ = c1.gates[int(rng.integers(len(c1.gates)))]
    u = c1.unitaries[gid]
    v = perturbation(1 << u.arity, eps, rng)
    c2 = c1.with_unitaries({**c1.unitaries, gid: Unitary(u.arity, v @ u.matrix)})
    dist = float(np.linalg.norm(dense_operator(c1) - dense_operator(c2), 2))
    return c1, c2, dist
