import math

import numpy as np
import pytest

from lnnqft.circuit import (
    Circuit, Gate, GateKind, InvalidCircuitError, cnot, compose, count_gates, cp, h, invert,
    is_nearest_neighbor, rz, validate_circuit, x,
)
from lnnqft.qft import build_lnn_qft_optimized, build_standard_qft
from lnnqft.rewrite import decompose_cp_all, random_circuit
from lnnqft.simulator import circuit_unitary


def test_validate_well_formed():
    assert validate_circuit(Circuit(2, (h(0), cnot(0, 1)))) == []


def test_validate_identical_control_target():
    v = validate_circuit(Circuit(2, (Gate(GateKind.CNOT, (0, 0)),)))
    assert len(v) == 1
    assert v[0].gate_index == 0 and "identical control/target" in v[0].reason


def test_validate_out_of_range():
    v = validate_circuit(Circuit(3, (h(5),)))
    assert len(v) == 1 and "index out of range" in v[0].reason


@pytest.mark.parametrize("gate, reason", [
    (Gate(GateKind.RZ, (0,)), "requires an angle"),
    (Gate(GateKind.H, (0,), 1.0), "takes no angle"),
    (Gate(GateKind.CNOT, (0,)), "expects 2"),
    (Gate(GateKind.RZ, (0,), math.inf), "not finite"),
])
def test_validate_gate_shape(gate, reason):
    v = validate_circuit(Circuit(2, (gate,)))
    assert len(v) == 1 and reason in v[0].reason


def test_validate_bad_permutation():
    v = validate_circuit(Circuit(2, (), 0.0, (0, 0)))
    assert v and v[0].gate_index is None


def test_nearest_neighbor():
    assert is_nearest_neighbor(Circuit(3, (cnot(0, 1),)))
    assert not is_nearest_neighbor(Circuit(3, (cnot(0, 2),)))
    assert is_nearest_neighbor(build_lnn_qft_optimized(5))
    with pytest.raises(InvalidCircuitError):
        is_nearest_neighbor(Circuit(2, (cnot(1, 1),)))


def test_nearest_neighbor_monotone_under_removal():
    rng = np.random.default_rng(3)
    for _ in range(50):
        c = random_circuit(rng, 4, 12)
        before = is_nearest_neighbor(c)
        drop = int(rng.integers(len(c.gates)))
        after = is_nearest_neighbor(c.with_gates(c.gates[:drop] + c.gates[drop + 1:]))
        assert after or not before


def test_count_gates_standard_qft():
    counts = count_gates(build_standard_qft(5))
    assert counts["cp"] == 10 and counts["h"] == 5 and counts.cnot_total == 0
    assert count_gates(decompose_cp_all(build_standard_qft(5))).cnot_total == 20


def test_count_gates_additive_under_compose():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a, b = random_circuit(rng, 3, 7), random_circuit(rng, 3, 9)
        assert count_gates(compose(a, b)).counts == (count_gates(a) + count_gates(b)).counts


def test_invert_simple():
    assert invert(Circuit(1, (h(0),))).gates == (h(0),)
    assert invert(Circuit(1, (rz(0, 0.4),))).gates == (rz(0, -0.4),)
    c = Circuit(3, (h(0), cp(1, 0, 0.3)), 0.2, (1, 2, 0))
    inv = invert(c)
    assert inv.gates == (cp(1, 0, -0.3), h(0))
    assert inv.global_phase == -0.2
    assert inv.output_permutation == (2, 0, 1)


def test_invert_random_circuits_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        c = random_circuit(rng, 4, 15)
        c = c.with_gates(c.gates, float(rng.uniform(-3, 3)))
        prod = circuit_unitary(invert(c)) @ circuit_unitary(c)
        assert np.max(np.abs(prod - np.eye(16))) < 1e-12


def test_invert_involution():
    rng = np.random.default_rng(5)
    for _ in range(20):
        c = random_circuit(rng, 3, 10)
        assert np.allclose(circuit_unitary(invert(invert(c))), circuit_unitary(c), atol=1e-12)


def test_compose_identity_and_inverse():
    c = Circuit(2, (h(0), cnot(0, 1)), 0.1)
    assert compose(c, Circuit(2)) == c
    assert np.allclose(circuit_unitary(compose(Circuit(1, (x(0),)), Circuit(1, (x(0),)))), np.eye(2))
    q = build_standard_qft(3)
    u = circuit_unitary(compose(q, invert(q)))
    assert np.max(np.abs(u - np.eye(8))) < 1e-12


def test_compose_unitary_order():
    rng = np.random.default_rng(8)
    for _ in range(20):
        a, b = random_circuit(rng, 3, 6), random_circuit(rng, 3, 6)
        want = circuit_unitary(b) @ circuit_unitary(a)
        assert np.max(np.abs(circuit_unitary(compose(a, b)) - want)) < 1e-11


def test_compose_mismatch():
    with pytest.raises(ValueError):
        compose(Circuit(2), Circuit(3))
