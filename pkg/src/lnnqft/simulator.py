"""Dense statevector / unitary simulation and the equivalence oracle.

Basis index convention: qubit 0 is the most significant bit.  Later gates
multiply on the left, and the circuit's global-phase ledger is included.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, GateKind

MAX_UNITARY_QUBITS = 10
MAX_STATE_QUBITS = 20
DEFAULT_TOL = 1e-9


class CapacityError(ValueError):
    pass


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _rx(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _controlled(u):
    m = np.eye(4, dtype=complex)
    m[2:, 2:] = u
    return m


def gate_matrix(g: Gate) -> np.ndarray:
    """2x2 or 4x4 matrix; two-qubit gates in (control, target) tensor order."""
    k = g.kind
    if k is GateKind.H:
        return _H.copy()
    if k is GateKind.X:
        return _X.copy()
    if k is GateKind.RX:
        return _rx(g.angle)
    if k is GateKind.RY:
        return _ry(g.angle)
    if k is GateKind.RZ:
        return _rz(g.angle)
    if k is GateKind.CNOT:
        return _CNOT.copy()
    if k is GateKind.SWAP:
        return _SWAP.copy()
    if k is GateKind.CP:
        return np.diag([1, 1, 1, np.exp(1j * g.angle)]).astype(complex)
    if k is GateKind.CRZ:
        return _controlled(_rz(g.angle))
    if k is GateKind.CRY:
        return _controlled(_ry(g.angle))
    raise ValueError(f"no matrix for {k}")


def _apply_gate(psi: np.ndarray, g: Gate, n: int) -> np.ndarray:
    # psi has shape (2,)*n + (batch,)
    m = len(g.qubits)
    mat = gate_matrix(g).reshape((2,) * (2 * m))
    out = np.tensordot(mat, psi, axes=(list(range(m, 2 * m)), list(g.qubits)))
    return np.moveaxis(out, list(range(m)), list(g.qubits))


def _evolve(block: np.ndarray, c: Circuit) -> np.ndarray:
    n = c.n_qubits
    batch = block.shape[1]
    psi = block.reshape((2,) * n + (batch,))
    for g in c.gates:
        psi = _apply_gate(psi, g, n)
    return psi.reshape(2**n, batch) * np.exp(1j * c.global_phase)


def zero_state(n: int) -> np.ndarray:
    sv = np.zeros(2**n, dtype=complex)
    sv[0] = 1.0
    return sv


def basis_state(bits: str) -> np.ndarray:
    sv = np.zeros(2 ** len(bits), dtype=complex)
    sv[int(bits, 2)] = 1.0
    return sv


def apply_circuit(sv: np.ndarray, c: Circuit) -> np.ndarray:
    c.check()
    sv = np.asarray(sv, dtype=complex)
    if sv.shape != (2**c.n_qubits,):
        raise ValueError(f"statevector of shape {sv.shape} does not match {c.n_qubits} qubits")
    if c.n_qubits > MAX_STATE_QUBITS:
        raise CapacityError(f"statevector simulation is limited to {MAX_STATE_QUBITS} qubits")
    return _evolve(sv.reshape(-1, 1), c)[:, 0]


def circuit_unitary(c: Circuit) -> np.ndarray:
    c.check()
    if c.n_qubits > MAX_UNITARY_QUBITS:
        raise CapacityError(
            f"unitary of a {c.n_qubits}-qubit circuit exceeds the {MAX_UNITARY_QUBITS}-qubit limit"
        )
    return _evolve(np.eye(2**c.n_qubits, dtype=complex), c)


def qft_matrix(n: int) -> np.ndarray:
    if not 1 <= n <= MAX_UNITARY_QUBITS:
        raise ValueError(f"qft_matrix needs 1 <= n <= {MAX_UNITARY_QUBITS}, got {n}")
    dim = 2**n
    jk = np.outer(np.arange(dim), np.arange(dim)) % dim
    return np.exp(2j * np.pi * jk / dim) / math.sqrt(dim)


def permutation_matrix(perm) -> np.ndarray:
    """Qubit relabeling: the bit of qubit ``i`` moves to qubit ``perm[i]``."""
    n = len(perm)
    dim = 2**n
    src = np.arange(dim)
    dst = np.zeros(dim, dtype=np.int64)
    for i, p in enumerate(perm):
        bit = (src >> (n - 1 - i)) & 1
        dst |= bit << (n - 1 - p)
    mat = np.zeros((dim, dim), dtype=complex)
    mat[dst, src] = 1.0
    return mat


def permute_state(sv: np.ndarray, perm) -> np.ndarray:
    n = len(perm)
    psi = np.asarray(sv).reshape((2,) * n)
    # axis i of the input becomes axis perm[i] of the output
    return np.moveaxis(psi, list(range(n)), list(perm)).reshape(-1)


def fidelity_up_to_phase(u: np.ndarray, v: np.ndarray) -> float:
    u, v = np.asarray(u), np.asarray(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(abs(np.vdot(u, v)) / u.shape[0])


@dataclass(frozen=True)
class EquivalenceReport:
    fidelity: float
    passed: bool
    tolerance: float
    permutation: tuple[int, ...]


def permuted_equivalence(c: Circuit, target: np.ndarray, perm=None, tol: float = DEFAULT_TOL) -> EquivalenceReport:
    perm = tuple(c.output_permutation if perm is None else perm)
    u = circuit_unitary(c)
    if target.shape != u.shape:
        raise ValueError(f"dimension mismatch: circuit {u.shape} vs target {target.shape}")
    f = fidelity_up_to_phase(u, permutation_matrix(perm) @ target)
    return EquivalenceReport(f, f >= 1 - tol, tol, perm)


def search_permutation(c: Circuit, target: np.ndarray, tol: float = DEFAULT_TOL, max_qubits: int = 6) -> EquivalenceReport:
    """Try all n! relabelings; returns the best one found."""
    if c.n_qubits > max_qubits:
        raise CapacityError(f"permutation search is limited to {max_qubits} qubits")
    u = circuit_unitary(c)
    best = None
    for perm in itertools.permutations(range(c.n_qubits)):
        f = fidelity_up_to_phase(u, permutation_matrix(perm) @ target)
        if best is None or f > best.fidelity:
            best = EquivalenceReport(f, f >= 1 - tol, tol, perm)
            if best.passed:
                break
    return best


def statevector_equivalence(c: Circuit, target: np.ndarray | None = None, *, n_states: int = 20, seed: int = 0,
                            perm=None, target_fn=None) -> float:
    """Max per-amplitude deviation between ``c`` and the permuted target on random states.

    ``target_fn`` maps a statevector to the target's action on it; by default the
    action of the dense ``target`` matrix. The comparison removes a single global
    phase estimated from the first state.
    """
    perm = tuple(c.output_permutation if perm is None else perm)
    if target_fn is None:
        target_fn = lambda v: target @ v  # noqa: E731
    rng = np.random.default_rng(seed)
    dim = 2**c.n_qubits
    phase = None
    worst = 0.0
    for _ in range(n_states):
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        got = apply_circuit(v, c)
        want = permute_state(target_fn(v), perm)
        if phase is None:
            ov = np.vdot(want, got)
            phase = ov / abs(ov)
        worst = max(worst, float(np.max(np.abs(got - phase * want))))
    return worst


def sample(sv: np.ndarray, shots: int, seed: int, n_qubits: int | None = None) -> dict[str, int]:
    """Multinomial draw from ``|amplitude|^2``; returns nonzero counts keyed by bitstring."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.abs(np.asarray(sv)) ** 2
    probs = probs / probs.sum()
    if n_qubits is None:
        n_qubits = int(round(math.log2(len(probs))))
    counts = np.random.default_rng(seed).multinomial(shots, probs)
    return {format(i, f"0{n_qubits}b"): int(k) for i, k in enumerate(counts) if k}


def marginal_probabilities(sv: np.ndarray, n_qubits: int, keep: int) -> np.ndarray:
    """Probabilities of the leading ``keep`` qubits."""
    probs = np.abs(np.asarray(sv).reshape(2**keep, 2 ** (n_qubits - keep))) ** 2
    return probs.sum(axis=1)
