"""Amplitude estimation: A-operators from controlled-Ry chains, their nearest-neighbor
conversion, the Grover operator and canonical (QPE-based) amplitude estimation.

Register layout: qubits 0..n-1 hold x, qubit n is the ancilla whose |1> component
is the "good" subspace.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, Gate, GateKind, cry, embed, h, invert, rx, ry, rz
from .qft import build_lnn_qft_optimized, build_standard_qft
from .rewrite import fan_blocks, run_pipeline, simplify
from .simulator import CapacityError, apply_circuit, circuit_unitary, zero_state

MAX_A_QUBITS = 6
MAX_M = 6
MAX_QAE_X = 3


@dataclass(frozen=True)
class AOperatorSpec:
    """theta(x) = theta_const + sum_k x_k * theta_linear[k]; f(x) = sin^2(theta(x) / 2)."""

    theta_const: float
    theta_linear: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "theta_const", float(self.theta_const))
        object.__setattr__(self, "theta_linear", tuple(float(v) for v in self.theta_linear))
        if not all(math.isfinite(v) for v in (self.theta_const, *self.theta_linear)):
            raise ValueError("A-operator angles must be finite")

    @property
    def n(self) -> int:
        return len(self.theta_linear)

    def theta_of(self, bits) -> float:
        return self.theta_const + sum(b * t for b, t in zip(bits, self.theta_linear))

    def amplitude(self) -> float:
        """a = 2^-n * sum_x sin^2(theta(x) / 2), by enumeration."""
        vals = [math.sin(self.theta_of(bits) / 2) ** 2 for bits in itertools.product((0, 1), repeat=self.n)]
        return sum(vals) / len(vals)


def build_a_operator(spec: AOperatorSpec) -> Circuit:
    if spec.n > MAX_A_QUBITS:
        raise ValueError(f"A-operator supports at most {MAX_A_QUBITS} x qubits, got {spec.n}")
    anc = spec.n
    gates = [h(k) for k in range(spec.n)]
    gates.append(ry(anc, spec.theta_const))
    gates += [cry(k, anc, th) for k, th in enumerate(spec.theta_linear)]
    return Circuit(spec.n + 1, tuple(gates))


def ancilla_one_probability(sv: np.ndarray) -> float:
    """P(last qubit = 1); the last qubit is the least significant bit."""
    return float(np.sum(np.abs(np.asarray(sv)[1::2]) ** 2))


class ChainShapeError(ValueError):
    pass


def _chain_target(c: Circuit) -> int:
    targets = {g.target for g in c.gates if g.kind is GateKind.CRY}
    if len(targets) != 1:
        raise ChainShapeError(f"expected controlled-Ry gates sharing one target, found targets {sorted(targets)}")
    t = targets.pop()
    seen_controls: set[int] = set()
    for i, g in enumerate(c.gates):
        on_target = t in g.qubits
        if g.kind is GateKind.CRY:
            seen_controls.add(g.control)
        elif on_target and g.kind is not GateKind.RY:
            raise ChainShapeError(f"gate {i} ({g}) acts on the shared target but is not Ry/CRy")
        elif not on_target and g.kind.n_qubits == 2:
            raise ChainShapeError(f"gate {i} ({g}) is a two-qubit gate outside the chain")
        elif not on_target and g.qubits[0] in seen_controls:
            raise ChainShapeError(f"gate {i} ({g}) acts on a control after it was used by the chain")
    return t


def convert_cry_chain_to_lnn(c: Circuit) -> Circuit:
    """Rewrite a controlled-Ry chain into a nearest-neighbor CNOT/Rz circuit.

    Ry(theta) = Rx(-pi/2) Rz(theta) Rx(pi/2) (matrix order) turns every CRy into a
    CRz sandwiched by Rx(+-pi/2) on the target; the interior Rx pairs cancel.  The
    CRz gates are diagonal: their target-only phase collects into one Rz and the
    remainder is a fan of parity blocks around the target, which the ladder
    identity makes nearest-neighbor.
    """
    c.check()
    t = _chain_target(c)
    prefix = [g for g in c.gates if t not in g.qubits]
    chain = [g for g in c.gates if t in g.qubits]

    converted: list[Gate] = []
    for g in chain:
        core = rz(t, g.angle) if g.kind is GateKind.RY else Gate(GateKind.CRZ, g.qubits, g.angle)
        converted += [rx(t, math.pi / 2), core, rx(t, -math.pi / 2)]
    stage = simplify(Circuit(c.n_qubits, tuple(prefix + converted), c.global_phase))

    # stage is: prefix, Rx(pi/2), diagonal run on the chain, Rx(-pi/2)
    body = list(stage.gates)
    first = next(i for i, g in enumerate(body) if g.kind is GateKind.RX)
    last = max(i for i, g in enumerate(body) if g.kind is GateKind.RX)
    linear = 0.0
    parity = [0.0] * c.n_qubits
    for g in body[first + 1: last]:
        if g.kind is GateKind.RZ:
            linear += g.angle
        elif g.kind is GateKind.CRZ:
            linear += g.angle / 2
            parity[g.control] -= g.angle / 2
        else:
            raise ChainShapeError(f"unexpected gate {g} inside converted chain")
    controls = [q for q in range(c.n_qubits) if parity[q] != 0.0]
    middle: list[Gate] = [rz(t, linear)] if linear else []
    below = [q for q in controls if q > t]
    above = [q for q in controls if q < t]
    if below:
        middle += fan_blocks(t, 1, [parity[w] for w in range(t + 1, max(below) + 1)])
    if above:
        middle += fan_blocks(t, -1, [parity[w] for w in range(t - 1, min(above) - 1, -1)])
    fanned = stage.with_gates(body[: first + 1] + middle + body[last:])
    return run_pipeline(fanned, ("fig2", "simplify"))[0]


@dataclass(frozen=True)
class GroverOperator:
    matrix: np.ndarray
    a: float
    theta_a: float
    a_state: np.ndarray

    @property
    def good_flip(self) -> np.ndarray:
        """Diagonal of S_chi: -1 where the ancilla (last qubit) is 1."""
        d = np.ones(len(self.a_state))
        d[1::2] = -1
        return d

    def invariant_basis(self) -> np.ndarray:
        """Orthonormal basis of span{A|0>, S_chi A|0>} as columns."""
        vecs = np.stack([self.a_state, self.good_flip * self.a_state], axis=1)
        q, r = np.linalg.qr(vecs)
        keep = np.abs(np.diag(r)) > 1e-12
        return q[:, keep]

    def invariant_eigenphases(self) -> np.ndarray:
        """Eigenphases of Q restricted to its two-dimensional invariant subspace, in (-pi, pi]."""
        b = self.invariant_basis()
        restricted = b.conj().T @ self.matrix @ b
        return np.sort(np.angle(np.linalg.eigvals(restricted)))


def build_grover_operator(a_circuit: Circuit) -> GroverOperator:
    """Q = -A S_0 A^dagger S_chi with S_chi the ancilla-1 phase flip."""
    if a_circuit.n_qubits > MAX_A_QUBITS:
        raise CapacityError(f"Grover operator is limited to {MAX_A_QUBITS} qubits")
    ua = circuit_unitary(a_circuit)
    dim = ua.shape[0]
    s0 = np.ones(dim)
    s0[0] = -1
    s_chi = np.ones(dim)
    s_chi[1::2] = -1
    q = -(ua * s0) @ ua.conj().T * s_chi
    a_state = ua[:, 0]
    a = min(max(ancilla_one_probability(a_state), 0.0), 1.0)
    return GroverOperator(q, a, math.asin(math.sqrt(a)), a_state)


def estimate_from_outcome(y: int, m: int) -> float:
    return math.sin(math.pi * y / 2**m) ** 2


def qae_error_bound(a: float, m: int) -> float:
    """|a_hat - a| <= 2 pi sqrt(a(1-a)) / 2^M + pi^2 / 4^M."""
    return 2 * math.pi * math.sqrt(a * (1 - a)) / 2**m + math.pi**2 / 4**m


def qae_distribution(spec: AOperatorSpec, m: int) -> np.ndarray:
    """Exact distribution of the M-bit QPE readout applied to Q with input A|0>."""
    if not 1 <= m <= MAX_M:
        raise ValueError(f"QAE precision M must be in 1..{MAX_M}, got {m}")
    if spec.n > MAX_QAE_X:
        raise CapacityError(f"QAE simulation supports at most {MAX_QAE_X} x qubits")
    grover = build_grover_operator(build_a_operator(spec))
    k = spec.n + 1
    psi = np.outer(np.full(2**m, 2 ** (-m / 2)), grover.a_state)
    power = grover.matrix
    rows = np.arange(2**m)
    for j in range(m):
        hit = ((rows >> (m - 1 - j)) & 1).astype(bool)
        psi[hit] = psi[hit] @ power.T
        power = power @ power
    inv = invert(build_standard_qft(1) if m == 1 else build_lnn_qft_optimized(m))
    out = apply_circuit(psi.reshape(-1), embed(inv, m + k))
    probs = np.sum(np.abs(out.reshape(2**m, 2**k)) ** 2, axis=1)
    return probs


@dataclass(frozen=True)
class QAEResult:
    y: int
    a_hat: float
    m: int
    shots: int
    seed: int
    spec: AOperatorSpec
    histogram: dict[str, int] = field(default_factory=dict)

    def within_bound_frequency(self, a: float) -> float:
        bound = qae_error_bound(a, self.m)
        hits = sum(v for k, v in self.histogram.items() if abs(estimate_from_outcome(int(k, 2), self.m) - a) <= bound)
        return hits / self.shots

    def records(self) -> list[dict]:
        head = {
            "theta_const": self.spec.theta_const, "theta_linear": list(self.spec.theta_linear),
            "M": self.m, "shots": self.shots, "seed": self.seed,
            "y": self.y, "a_hat": self.a_hat,
        }
        return [head] + [
            {"outcome": k, "count": v, "a_hat": estimate_from_outcome(int(k, 2), self.m)}
            for k, v in sorted(self.histogram.items())
        ]


def run_qae(spec: AOperatorSpec, m: int, shots: int = 1000, seed: int = 0) -> QAEResult:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = np.clip(qae_distribution(spec, m), 0, None)
    counts = np.random.default_rng(seed).multinomial(shots, probs / probs.sum())
    hist = {format(i, f"0{m}b"): int(c) for i, c in enumerate(counts) if c}
    best = max(hist.items(), key=lambda kv: (kv[1], -int(kv[0], 2)))[0]
    y = int(best, 2)
    return QAEResult(y, estimate_from_outcome(y, m), m, shots, seed, spec, hist)
