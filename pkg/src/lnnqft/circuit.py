"""Gate-level circuit IR.

A :class:`Circuit` is an immutable, time-ordered list of :class:`Gate` values on
``n_qubits`` wires, together with a scalar global-phase ledger and an explicit
output permutation.  ``output_permutation[i]`` is the wire on which logical
qubit ``i`` ends up, so a circuit with unitary ``U`` implements a target ``T``
when ``U == exp(i*phi) * P(output_permutation) @ T``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence


class GateKind(str, Enum):
    H = "h"
    X = "x"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    CNOT = "cx"
    CP = "cp"
    CRZ = "crz"
    CRY = "cry"
    SWAP = "swap"

    @property
    def n_qubits(self) -> int:
        return 2 if self in TWO_QUBIT else 1

    @property
    def parameterized(self) -> bool:
        return self in PARAMETERIZED


TWO_QUBIT = frozenset({GateKind.CNOT, GateKind.CP, GateKind.CRZ, GateKind.CRY, GateKind.SWAP})
PARAMETERIZED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CP, GateKind.CRZ, GateKind.CRY})
SELF_INVERSE = frozenset({GateKind.H, GateKind.X, GateKind.CNOT, GateKind.SWAP})
DIAGONAL = frozenset({GateKind.RZ, GateKind.CP, GateKind.CRZ})


class InvalidCircuitError(ValueError):
    """Raised when an operation requires a structurally valid circuit."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid circuit: {lines}")


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def control(self) -> int:
        return self.qubits[0]

    @property
    def target(self) -> int:
        return self.qubits[-1]

    def acts_on(self, q: int) -> bool:
        return q in self.qubits

    def __str__(self) -> str:
        args = " ".join(str(q) for q in self.qubits)
        if self.angle is not None:
            return f"{self.kind.value} {args} {self.angle!r}"
        return f"{self.kind.value} {args}"


# Constructors, in the (control, target) argument order used throughout.
def h(q): return Gate(GateKind.H, (q,))
def x(q): return Gate(GateKind.X, (q,))
def rx(q, theta): return Gate(GateKind.RX, (q,), theta)
def ry(q, theta): return Gate(GateKind.RY, (q,), theta)
def rz(q, theta): return Gate(GateKind.RZ, (q,), theta)
def cnot(c, t): return Gate(GateKind.CNOT, (c, t))
def cp(c, t, theta): return Gate(GateKind.CP, (c, t), theta)
def crz(c, t, theta): return Gate(GateKind.CRZ, (c, t), theta)
def cry(c, t, theta): return Gate(GateKind.CRY, (c, t), theta)
def swap(a, b): return Gate(GateKind.SWAP, (a, b))


def identity_permutation(n: int) -> tuple[int, ...]:
    return tuple(range(n))


def reversal_permutation(n: int) -> tuple[int, ...]:
    return tuple(range(n - 1, -1, -1))


def compose_permutations(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """Relabeling ``first`` followed by ``second``: ``i -> second[first[i]]``."""
    return tuple(second[p] for p in first)


def inverse_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return tuple(inv)


def is_permutation(perm: Sequence[int], n: int) -> bool:
    return len(perm) == n and sorted(perm) == list(range(n))


@dataclass(frozen=True)
class Violation:
    gate_index: int | None
    reason: str

    def __str__(self) -> str:
        where = "circuit" if self.gate_index is None else f"gate {self.gate_index}"
        return f"{where}: {self.reason}"


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    global_phase: float = 0.0
    output_permutation: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "global_phase", float(self.global_phase))
        perm = self.output_permutation
        if perm is None:
            perm = identity_permutation(self.n_qubits)
        object.__setattr__(self, "output_permutation", tuple(int(p) for p in perm))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def with_gates(self, gates: Iterable[Gate], phase_delta: float = 0.0) -> "Circuit":
        return replace(self, gates=tuple(gates), global_phase=self.global_phase + phase_delta)

    def append(self, *gates: Gate) -> "Circuit":
        return replace(self, gates=self.gates + gates)

    def check(self) -> "Circuit":
        """Return self, or raise :class:`InvalidCircuitError`."""
        violations = validate_circuit(self)
        if violations:
            raise InvalidCircuitError(violations)
        return self


def validate_circuit(c: Circuit) -> list[Violation]:
    out: list[Violation] = []
    if not isinstance(c.n_qubits, int) or c.n_qubits < 1:
        out.append(Violation(None, f"n_qubits must be a positive integer, got {c.n_qubits!r}"))
        return out
    if not math.isfinite(c.global_phase):
        out.append(Violation(None, "global phase is not finite"))
    if not is_permutation(c.output_permutation, c.n_qubits):
        out.append(Violation(None, f"output permutation {c.output_permutation} is not a bijection on {c.n_qubits} qubits"))
    for i, g in enumerate(c.gates):
        if len(g.qubits) != g.kind.n_qubits:
            out.append(Violation(i, f"{g.kind.value} expects {g.kind.n_qubits} qubit(s), got {len(g.qubits)}"))
            continue
        bad = [q for q in g.qubits if not 0 <= q < c.n_qubits]
        if bad:
            out.append(Violation(i, f"index out of range: {bad} with n_qubits={c.n_qubits}"))
        if g.kind.n_qubits == 2 and g.qubits[0] == g.qubits[1]:
            out.append(Violation(i, "identical control/target"))
        if g.kind.parameterized:
            if g.angle is None:
                out.append(Violation(i, f"{g.kind.value} requires an angle"))
            elif not math.isfinite(g.angle):
                out.append(Violation(i, "angle is not finite"))
        elif g.angle is not None:
            out.append(Violation(i, f"{g.kind.value} takes no angle"))
    return out


def is_nearest_neighbor(c: Circuit) -> bool:
    c.check()
    return all(abs(g.qubits[0] - g.qubits[1]) == 1 for g in c.gates if g.kind.n_qubits == 2)


@dataclass(frozen=True)
class GateCountReport:
    counts: dict[str, int] = field(default_factory=dict)

    @property
    def cnot_total(self) -> int:
        return self.counts.get(GateKind.CNOT.value, 0)

    def __getitem__(self, kind) -> int:
        return self.counts.get(GateKind(kind).value, 0)

    def __add__(self, other: "GateCountReport") -> "GateCountReport":
        merged = Counter(self.counts)
        merged.update(other.counts)
        return GateCountReport(dict(merged))

    def summary(self) -> str:
        parts = [f"{k.upper() if k != 'cx' else 'CNOT'}: {v}" for k, v in sorted(self.counts.items())]
        return ", ".join(parts) if parts else "(empty)"


def count_gates(c: Circuit) -> GateCountReport:
    """Exact per-kind tallies; CP and SWAP are not converted to CNOTs here."""
    return GateCountReport(dict(Counter(g.kind.value for g in c.gates)))


def cnot_cost(c: Circuit) -> int:
    """CNOT count after the standard two-qubit decompositions (CP/CRz/CRy: 2, SWAP: 3)."""
    cost = {GateKind.CNOT: 1, GateKind.CP: 2, GateKind.CRZ: 2, GateKind.CRY: 2, GateKind.SWAP: 3}
    return sum(cost.get(g.kind, 0) for g in c.gates)


def inverse_gate(g: Gate) -> Gate:
    if g.kind in SELF_INVERSE:
        return g
    return Gate(g.kind, g.qubits, -g.angle)


def invert(c: Circuit) -> Circuit:
    c.check()
    return Circuit(
        c.n_qubits,
        tuple(inverse_gate(g) for g in reversed(c.gates)),
        -c.global_phase,
        inverse_permutation(c.output_permutation),
    )


def compose(a: Circuit, b: Circuit) -> Circuit:
    """``a`` then ``b``; the unitary of the result is ``U_b @ U_a``."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"cannot compose circuits on {a.n_qubits} and {b.n_qubits} qubits")
    return Circuit(
        a.n_qubits,
        a.gates + b.gates,
        a.global_phase + b.global_phase,
        compose_permutations(a.output_permutation, b.output_permutation),
    )


def embed(c: Circuit, n_qubits: int, offset: int = 0) -> Circuit:
    """Place ``c`` on wires ``offset .. offset + c.n_qubits - 1`` of a wider register."""
    if offset < 0 or offset + c.n_qubits > n_qubits:
        raise ValueError("embedding does not fit in the target register")
    gates = tuple(Gate(g.kind, tuple(q + offset for q in g.qubits), g.angle) for g in c.gates)
    perm = list(range(n_qubits))
    for i, p in enumerate(c.output_permutation):
        perm[i + offset] = p + offset
    return Circuit(n_qubits, gates, c.global_phase, tuple(perm))
