"""Worked examples for each public operation, one small case per behaviour."""
import math
from fractions import Fraction

import numpy as np
import pytest

from lnnqft.circuit import Circuit, cnot, count_gates, cp, cry, h, rz, x
from lnnqft.cli import main
from lnnqft.qae import AOperatorSpec, build_a_operator, build_grover_operator, convert_cry_chain_to_lnn, run_qae
from lnnqft.qft import build_lnn_qft_optimized, build_standard_qft
from lnnqft.qpe import PhaseFraction, build_controlled_power_u, build_qpe_circuit, qpe_distribution
from lnnqft.rewrite import RULES, apply_rule, simplify
from lnnqft.routing import route_to_lnn
from lnnqft.simulator import (
    apply_circuit, basis_state, circuit_unitary, fidelity_up_to_phase, gate_matrix, permuted_equivalence,
    qft_matrix, sample, zero_state,
)


def test_gate_matrix_definitions():
    assert np.allclose(gate_matrix(h(0)), np.array([[1, 1], [1, -1]]) / math.sqrt(2))
    assert np.allclose(gate_matrix(rz(0, math.pi)), np.diag([-1j, 1j]))
    assert np.allclose(gate_matrix(cp(0, 1, math.pi / 2)), np.diag([1, 1, 1, 1j]))


def test_small_state_evolutions():
    assert np.allclose(apply_circuit(zero_state(1), Circuit(1, (h(0),))), [1 / math.sqrt(2)] * 2)
    assert np.allclose(apply_circuit(basis_state("10"), Circuit(2, (cnot(0, 1),))), basis_state("11"))
    assert np.allclose(apply_circuit(zero_state(3), build_standard_qft(3)), np.full(8, 1 / math.sqrt(8)))
    assert np.allclose(circuit_unitary(Circuit(2)), np.eye(4))
    assert np.allclose(circuit_unitary(Circuit(1, (h(0),))), gate_matrix(h(0)))


def test_qft_matrix_examples():
    assert np.allclose(qft_matrix(1), gate_matrix(h(0)))
    assert qft_matrix(2)[1, 1] == pytest.approx(0.5j)
    q = qft_matrix(4)
    assert np.max(np.abs(q.conj().T @ q - np.eye(16))) < 1e-12


def test_fidelity_examples():
    u = qft_matrix(2)
    assert fidelity_up_to_phase(u, u) == pytest.approx(1.0)
    assert fidelity_up_to_phase(u, np.exp(0.7j) * u) == pytest.approx(1.0)
    xi = np.kron(np.array([[0, 1], [1, 0]]), np.eye(2))
    assert fidelity_up_to_phase(np.eye(4), xi) == pytest.approx(0.0)


def test_identity_perm_fidelity_is_low():
    rep = permuted_equivalence(build_standard_qft(3), qft_matrix(3), perm=(0, 1, 2))
    assert rep.fidelity < 0.99
    assert permuted_equivalence(build_lnn_qft_optimized(5), qft_matrix(5)).passed


def test_sample_examples():
    assert sample(basis_state("01"), 100, seed=0) == {"01": 100}
    counts = sample(np.array([1, 1]) / math.sqrt(2), 100_000, seed=123)
    sigma = math.sqrt(100_000 * 0.25)
    assert all(abs(counts[k] - 50_000) <= 3 * sigma for k in ("0", "1"))


@pytest.mark.parametrize("theta", [math.pi / 2, math.pi / 4, 0.3])
def test_cp_decomposition_with_ledger(theta):
    out, ok = apply_rule(Circuit(2, (cp(0, 1, theta),)), RULES["cp_decomposition"], 0)
    assert ok
    assert np.max(np.abs(circuit_unitary(out) - gate_matrix(cp(0, 1, theta)))) < 1e-12


def test_cp_half_pi_counts_and_ledger():
    out, _ = apply_rule(Circuit(2, (cp(0, 1, math.pi / 2),)), RULES["cp_decomposition"], 0)
    assert count_gates(out).cnot_total == 2 and count_gates(out)["rz"] == 3
    assert out.global_phase == pytest.approx(math.pi / 8)


def test_cp_zero_prunes_to_identity():
    out, _ = apply_rule(Circuit(2, (cp(0, 1, 0.0),)), RULES["cp_decomposition"], 0)
    assert simplify(out).gates == ()


def test_controlled_power_examples():
    assert build_controlled_power_u(PhaseFraction(Fraction(1, 2)), 0, 0, 1) == [cp(0, 1, math.pi)]
    assert build_controlled_power_u(PhaseFraction(Fraction(1, 8)), 2, 0, 1) == [cp(0, 1, math.pi)]
    assert build_controlled_power_u(PhaseFraction(Fraction(1, 8)), 3, 0, 1) == []


def test_qpe_examples():
    p = qpe_distribution(PhaseFraction(Fraction(3, 8)), 3)
    assert p[0b011] == pytest.approx(1.0, abs=1e-12)
    assert qpe_distribution(PhaseFraction(0), 3, "lnn")[0] == pytest.approx(1.0, abs=1e-12)


def test_routing_examples():
    lnn = Circuit(3, (cnot(0, 1), cnot(2, 1), h(2)))
    r = route_to_lnn(lnn)
    assert r.gates == lnn.gates and r.output_permutation == (0, 1, 2)
    qpe = build_qpe_circuit(PhaseFraction(Fraction(1, 3)), 3, "all2all")
    routed = route_to_lnn(qpe)
    assert permuted_equivalence(routed, circuit_unitary(qpe)).passed


def test_a_operator_examples():
    assert AOperatorSpec(math.pi / 2, (math.pi / 2,)).amplitude() == pytest.approx(0.75)
    assert AOperatorSpec(0.0, (0.0, 0.0)).amplitude() == 0.0
    assert AOperatorSpec(math.pi).amplitude() == pytest.approx(1.0)


def test_single_cry_conversion_exact():
    c = Circuit(2, (cry(0, 1, 0.9),))
    conv = convert_cry_chain_to_lnn(c)
    assert conv.output_permutation == (0, 1)
    assert np.max(np.abs(circuit_unitary(conv) - gate_matrix(cry(0, 1, 0.9)))) < 1e-12


def test_grover_examples():
    g = build_grover_operator(build_a_operator(AOperatorSpec(math.pi / 2)))
    assert np.allclose(np.sort(g.invariant_eigenphases()), [-math.pi / 2, math.pi / 2], atol=1e-12)
    g0 = build_grover_operator(build_a_operator(AOperatorSpec(0.0, (0.0,))))
    assert np.allclose(g0.matrix @ g0.a_state, g0.a_state, atol=1e-12)
    rng = np.random.default_rng(0)
    for _ in range(5):
        spec = AOperatorSpec(float(rng.uniform(-3, 3)), tuple(rng.uniform(-3, 3, size=2)))
        q = build_grover_operator(build_a_operator(spec)).matrix
        assert np.max(np.abs(q.conj().T @ q - np.eye(len(q)))) < 1e-10


def test_qae_zero_amplitude():
    res = run_qae(AOperatorSpec(0.0, (0.0,)), 3, 500, seed=0)
    assert res.a_hat == 0.0 and res.histogram == {"000": 500}


def test_cli_examples(tmp_path, capsys):
    out = tmp_path / "one.txt"
    assert main(["synth", "--n", "1", "--family", "standard", "--out", str(out)]) == 0
    assert out.read_text() == "qubits 1\nh 0\n"
    assert main(["synth", "--n", "12", "--family", "lnn-optimized", "--out", str(tmp_path / "x")]) == 2
    assert "capacity" in capsys.readouterr().err
    assert main(["qpe", "--theta", "0", "--t", "3", "--out", str(tmp_path / "q.jsonl")]) == 0
    assert "best outcome: 000" in capsys.readouterr().out
    assert main(["qae", "--theta-const", "0", "--theta-linear", "0", "--M", "3",
                 "--out", str(tmp_path / "a.jsonl")]) == 0
    assert "a_hat: 0\n" in capsys.readouterr().out
    assert main(["qpe", "--theta", "3/8", "--t", "3", "--shots", "1000", "--seed", "7",
                 "--out", str(tmp_path / "q2.jsonl")]) == 0
    assert "success_rate: 1.0" in capsys.readouterr().out


def test_x_gate_flip():
    assert np.allclose(apply_circuit(zero_state(1), Circuit(1, (x(0),))), basis_state("1"))
