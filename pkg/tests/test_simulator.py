import cmath
import math

import numpy as np
import pytest

from lnnqft.circuit import Circuit, Gate, GateKind, cnot, cp, crz, cry, h, rx, ry, rz, swap, x
from lnnqft.qft import build_standard_qft
from lnnqft.rewrite import random_circuit
from lnnqft.simulator import (
    CapacityError, apply_circuit, basis_state, circuit_unitary, fidelity_up_to_phase, gate_matrix,
    marginal_probabilities, permutation_matrix, permute_state, permuted_equivalence, qft_matrix, sample,
    search_permutation, statevector_equivalence, zero_state,
)

I2 = np.eye(2)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def kron(*ms):
    out = np.eye(1)
    for m in ms:
        out = np.kron(out, m)
    return out


def test_rotation_matrices():
    t = 0.37
    assert np.allclose(gate_matrix(rz(0, t)), np.diag([cmath.exp(-0.5j * t), cmath.exp(0.5j * t)]))
    # Rx(t) = exp(-i t X / 2) via eigen-decomposition of X
    w, v = np.linalg.eigh(X)
    assert np.allclose(gate_matrix(rx(0, t)), v @ np.diag(np.exp(-0.5j * t * w)) @ v.conj().T)
    Y = np.array([[0, -1j], [1j, 0]])
    w, v = np.linalg.eigh(Y)
    assert np.allclose(gate_matrix(ry(0, t)), v @ np.diag(np.exp(-0.5j * t * w)) @ v.conj().T)


def test_two_qubit_matrices():
    assert np.allclose(gate_matrix(cp(0, 1, 0.8)), np.diag([1, 1, 1, cmath.exp(0.8j)]))
    assert np.allclose(gate_matrix(cnot(0, 1)), kron(P0, I2) + kron(P1, X))
    sw = sum(np.kron(np.outer(I2[a], I2[b]), np.outer(I2[b], I2[a])) for a in range(2) for b in range(2))
    assert np.allclose(gate_matrix(swap(0, 1)), sw)


def test_qubit_zero_is_msb():
    assert np.allclose(apply_circuit(zero_state(2), Circuit(2, (x(0),))), basis_state("10"))
    assert np.allclose(apply_circuit(zero_state(3), Circuit(3, (x(2),))), basis_state("001"))


def test_unitary_matches_kron_oracle():
    # CNOT with control below target and non-adjacent wires
    c = Circuit(3, (h(1), cnot(2, 0), rz(0, 0.3)))
    step1 = kron(I2, H, I2)
    step2 = kron(I2, I2, P0) + kron(X, I2, P1)
    step3 = kron(gate_matrix(rz(0, 0.3)), I2, I2)
    assert np.max(np.abs(circuit_unitary(c) - step3 @ step2 @ step1)) < 1e-14


@pytest.mark.parametrize("g", [cp(2, 0, 1.1), crz(0, 2, 0.7), cry(1, 3, -0.4), swap(3, 1)])
def test_controlled_gate_oracle(g):
    n = 4
    u = circuit_unitary(Circuit(n, (g,)))
    # brute-force via basis states
    base = gate_matrix(g)
    a, b = g.qubits
    want = np.zeros((16, 16), dtype=complex)
    for col in range(16):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        for sub in range(4):
            amp = base[sub, bits[a] * 2 + bits[b]]
            out = list(bits)
            out[a], out[b] = sub >> 1, sub & 1
            want[int("".join(map(str, out)), 2), col] += amp
    assert np.max(np.abs(u - want)) < 1e-14


def test_global_phase_ledger():
    u = circuit_unitary(Circuit(1, (), 0.5))
    assert np.allclose(u, cmath.exp(0.5j) * np.eye(2))


def test_qft_matrix_oracle():
    for n in (1, 2, 3, 5):
        dim = 2**n
        w = cmath.exp(2j * math.pi / dim)
        want = np.array([[w ** (j * k) for k in range(dim)] for j in range(dim)]) / math.sqrt(dim)
        assert np.allclose(qft_matrix(n), want, atol=1e-12)
    with pytest.raises(ValueError):
        qft_matrix(11)


def test_capacity_limit():
    with pytest.raises(CapacityError):
        circuit_unitary(Circuit(11))


def test_fidelity_up_to_phase():
    u = qft_matrix(3)
    assert fidelity_up_to_phase(u, cmath.exp(1.3j) * u) == pytest.approx(1.0, abs=1e-12)
    assert fidelity_up_to_phase(np.eye(8), u) < 0.5
    with pytest.raises(ValueError):
        fidelity_up_to_phase(np.eye(4), np.eye(8))


def test_permutation_matrix_moves_bits():
    perm = (2, 0, 1)
    p = permutation_matrix(perm)
    # qubit 0 carries 1 -> lands on wire 2
    assert np.allclose(p @ basis_state("100"), basis_state("001"))
    v = np.arange(8, dtype=complex)
    assert np.allclose(permute_state(v, perm), p @ v)


def test_permuted_equivalence_identity_fails_for_standard_qft():
    c = build_standard_qft(4)
    assert permuted_equivalence(c, qft_matrix(4)).passed
    bad = permuted_equivalence(c, qft_matrix(4), perm=tuple(range(4)))
    assert not bad.passed


def test_search_permutation_finds_reversal():
    c = build_standard_qft(3)
    c = Circuit(3, c.gates)
    rep = search_permutation(c, qft_matrix(3))
    assert rep.passed and rep.permutation == (2, 1, 0)


def test_statevector_equivalence():
    c = build_standard_qft(4)
    assert statevector_equivalence(c, qft_matrix(4)) < 1e-12
    assert statevector_equivalence(c, target_fn=lambda v: np.fft.ifft(v) * 4) < 1e-12
    broken = c.with_gates(c.gates[:-1])
    assert statevector_equivalence(broken, qft_matrix(4)) > 1e-3


def test_norm_preservation_random():
    rng = np.random.default_rng(99)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        c = random_circuit(rng, n, int(rng.integers(0, 20)))
        v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
        v /= np.linalg.norm(v)
        assert abs(np.linalg.norm(apply_circuit(v, c)) - 1) < 1e-12


def test_apply_matches_unitary():
    rng = np.random.default_rng(4)
    for _ in range(30):
        c = random_circuit(rng, 4, 12)
        v = rng.normal(size=16) + 0j
        assert np.allclose(apply_circuit(v, c), circuit_unitary(c) @ v, atol=1e-12)


def test_sample_deterministic_and_binomial():
    sv = apply_circuit(zero_state(1), Circuit(1, (ry(0, 2 * math.asin(math.sqrt(0.3))),)))
    a = sample(sv, 10_000, seed=7)
    assert a == sample(sv, 10_000, seed=7)
    sigma = math.sqrt(0.3 * 0.7 / 10_000)
    assert abs(a.get("1", 0) / 10_000 - 0.3) <= 3 * sigma
    with pytest.raises(ValueError):
        sample(sv, 0, seed=0)


def test_marginal_probabilities():
    sv = apply_circuit(zero_state(3), Circuit(3, (h(0), x(2))))
    assert np.allclose(marginal_probabilities(sv, 3, 1), [0.5, 0.5])
    assert np.allclose(marginal_probabilities(sv, 3, 2), [0.5, 0, 0.5, 0])


def test_gate_matrix_rejects_bad_kind():
    with pytest.raises(Exception):
        gate_matrix(Gate(GateKind.RZ, (0,)))
