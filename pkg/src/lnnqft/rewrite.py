"""Template rewriting: decompositions, peephole passes and the fan/ladder identity.

A :class:`RewriteRule` is data: a ``find`` function that tries to anchor a match
at a gate index, plus a ``sample`` function that draws a random instance of the
rule's left-hand side (used by :func:`validate_rule`).  Every rule is checked
against the dense simulator before it is trusted.

A match consumes some gate positions and supplies replacement gates, which are
inserted at the first consumed position.  Matchers only consume gates that are
adjacent on the wires they touch, so the insertion point is always legal.
``Match.phase_delta`` is added to the circuit's global-phase ledger so that the
rewritten circuit's unitary (ledger included) equals the original exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuit import Circuit, Gate, GateKind, cnot, count_gates, cp, crz, cry, rx, rz, swap
from .simulator import circuit_unitary

ZERO_TOL = 1e-12
_ROTATIONS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.CRZ, GateKind.CRY})


@dataclass(frozen=True)
class Match:
    indices: tuple[int, ...]
    replacement: tuple[Gate, ...]
    phase_delta: float = 0.0


@dataclass(frozen=True)
class RewriteRule:
    name: str
    find: Callable[[Sequence[Gate], int], Match | None]
    sample: Callable[[np.random.Generator, int], list[Gate]]
    min_qubits: int = 1


def next_on_wires(gates: Sequence[Gate], i: int, wires) -> int | None:
    """Index of the first gate after ``i`` touching any of ``wires``."""
    wires = set(wires)
    for j in range(i + 1, len(gates)):
        if wires.intersection(gates[j].qubits):
            return j
    return None


def _angle(rng):
    return float(rng.uniform(-2 * math.pi, 2 * math.pi))


def _pair(rng, n):
    a, b = rng.choice(n, size=2, replace=False)
    return int(a), int(b)


def _adjacent_pair(rng, n):
    a = int(rng.integers(n - 1))
    return (a, a + 1) if rng.random() < 0.5 else (a + 1, a)


# --- decompositions ----------------------------------------------------------

def cp_decomposition(c: int, t: int, theta: float) -> list[Gate]:
    """CP(theta) == exp(i*theta/4) * (these gates)."""
    return [rz(c, theta / 2), rz(t, theta / 2), cnot(c, t), rz(t, -theta / 2), cnot(c, t)]


def crz_decomposition(c: int, t: int, theta: float) -> list[Gate]:
    return [rz(t, theta / 2), cnot(c, t), rz(t, -theta / 2), cnot(c, t)]


def _find_cp(gates, i):
    g = gates[i]
    if g.kind is not GateKind.CP:
        return None
    return Match((i,), tuple(cp_decomposition(g.control, g.target, g.angle)), g.angle / 4)


def _find_swap(gates, i):
    g = gates[i]
    if g.kind is not GateKind.SWAP:
        return None
    a, b = g.qubits
    return Match((i,), (cnot(a, b), cnot(b, a), cnot(a, b)))


def _find_crz(gates, i):
    g = gates[i]
    if g.kind is not GateKind.CRZ:
        return None
    return Match((i,), tuple(crz_decomposition(g.control, g.target, g.angle)))


def _find_cry(gates, i):
    g = gates[i]
    if g.kind is not GateKind.CRY:
        return None
    t = g.target
    return Match((i,), (rx(t, math.pi / 2), crz(g.control, t, g.angle), rx(t, -math.pi / 2)))


# --- peephole rules ------------------------------------------------------------

def _find_cnot_cancel(gates, i):
    g = gates[i]
    if g.kind is not GateKind.CNOT:
        return None
    j = next_on_wires(gates, i, g.qubits)
    if j is not None and gates[j] == g:
        return Match((i, j), ())
    return None


def _merge_finder(kind):
    def find(gates, i):
        g = gates[i]
        if g.kind is not kind:
            return None
        j = next_on_wires(gates, i, g.qubits)
        if j is None or gates[j].kind is not kind:
            return None
        return Match((i, j), (Gate(kind, g.qubits, g.angle + gates[j].angle),))
    return find


def _find_control_rz(gates, i):
    g = gates[i]
    if g.kind is not GateKind.CNOT:
        return None
    j = next_on_wires(gates, i, (g.control,))
    if j is None or gates[j].kind is not GateKind.RZ:
        return None
    return Match((i, j), (gates[j], g))


def is_zero_angle(g: Gate) -> bool:
    if g.kind in _ROTATIONS:
        period = 4 * math.pi
    elif g.kind is GateKind.CP:
        period = 2 * math.pi
    else:
        return False
    r = math.remainder(g.angle, period)
    return abs(r) < ZERO_TOL


def _find_zero(gates, i):
    if is_zero_angle(gates[i]):
        return Match((i,), ())
    return None


# --- fan / ladder identity ---------------------------------------------------

def fan_blocks(hub: int, step: int, phis: Sequence[float]) -> list[Gate]:
    """CNOT(hub->w) Rz(w, phi) CNOT(hub->w) for w = hub+step, hub+2*step, ..."""
    out = []
    for k, phi in enumerate(phis, start=1):
        w = hub + k * step
        out += [cnot(hub, w), rz(w, phi), cnot(hub, w)]
    return out


def fan_ladder(hub: int, step: int, phis: Sequence[float]) -> list[Gate]:
    """Nearest-neighbor equivalent of :func:`fan_blocks`.

    The fan's targets are first difference-encoded (wire k holds y_{k-1} xor y_k),
    a CNOT ladder from the hub then exposes hub xor y_k on wire k for every k,
    and the ladder and encoding are undone in reverse.
    """
    m = len(phis)
    w = [hub + k * step for k in range(m + 1)]
    encode = [cnot(w[k - 1], w[k]) for k in range(m, 1, -1)]
    down = []
    for k in range(1, m + 1):
        down += [cnot(w[k - 1], w[k]), rz(w[k], phis[k - 1])]
    up = [cnot(w[k - 1], w[k]) for k in range(m, 0, -1)]
    decode = [cnot(w[k - 1], w[k]) for k in range(2, m + 1)]
    return encode + down + up + decode


def match_fan(gates: Sequence[Gate], i: int) -> tuple[int, int, list[float]] | None:
    """Longest run of consecutive fan blocks starting at ``i``: (hub, step, phis)."""
    g = gates[i]
    if g.kind is not GateKind.CNOT or abs(g.target - g.control) != 1:
        return None
    hub, step = g.control, g.target - g.control
    phis = []
    pos = i
    while pos + 2 < len(gates):
        w = hub + (len(phis) + 1) * step
        a, b, c = gates[pos: pos + 3]
        if not (a == cnot(hub, w) and c == a and b.kind is GateKind.RZ and b.qubits == (w,)):
            break
        phis.append(b.angle)
        pos += 3
    return (hub, step, phis) if phis else None


def _find_fan(gates, i):
    m = match_fan(gates, i)
    if m is None:
        return None
    hub, step, phis = m
    return Match(tuple(range(i, i + 3 * len(phis))), tuple(fan_ladder(hub, step, phis)))


# --- samplers (random LHS instances on n qubits) -------------------------------

def _sample_cp(rng, n):
    a, b = _pair(rng, n)
    return [cp(a, b, _angle(rng))]


def _sample_swap(rng, n):
    return [swap(*_pair(rng, n))]


def _sample_crz(rng, n):
    a, b = _pair(rng, n)
    return [crz(a, b, _angle(rng))]


def _sample_cry(rng, n):
    a, b = _pair(rng, n)
    return [cry(a, b, _angle(rng))]


def _sample_cnot_cancel(rng, n):
    a, b = _pair(rng, n)
    return [cnot(a, b), cnot(a, b)]


def _merge_sampler(kind):
    def sample(rng, n):
        q = int(rng.integers(n))
        return [Gate(kind, (q,), _angle(rng)), Gate(kind, (q,), _angle(rng))]
    return sample


def _sample_control_rz(rng, n):
    a, b = _pair(rng, n)
    return [cnot(a, b), rz(a, _angle(rng))]


def _sample_zero(rng, n):
    q = int(rng.integers(n))
    kind = [GateKind.RX, GateKind.RY, GateKind.RZ][int(rng.integers(3))]
    return [Gate(kind, (q,), 4 * math.pi * int(rng.integers(-2, 3)))]


def _sample_fan(rng, n):
    m = int(rng.integers(1, n))
    if rng.random() < 0.5:
        hub, step = int(rng.integers(0, n - m)), 1
    else:
        hub, step = int(rng.integers(m, n)), -1
    return fan_blocks(hub, step, [_angle(rng) for _ in range(m)])


CP_DECOMPOSITION = RewriteRule("cp_decomposition", _find_cp, _sample_cp, 2)
SWAP_DECOMPOSITION = RewriteRule("swap_decomposition", _find_swap, _sample_swap, 2)
CRZ_DECOMPOSITION = RewriteRule("crz_decomposition", _find_crz, _sample_crz, 2)
CRY_TO_CRZ = RewriteRule("cry_to_crz", _find_cry, _sample_cry, 2)
CNOT_CANCELLATION = RewriteRule("cnot_cancellation", _find_cnot_cancel, _sample_cnot_cancel, 2)
RZ_MERGE = RewriteRule("rz_merge", _merge_finder(GateKind.RZ), _merge_sampler(GateKind.RZ))
RX_MERGE = RewriteRule("rx_merge", _merge_finder(GateKind.RX), _merge_sampler(GateKind.RX))
CONTROL_RZ_COMMUTATION = RewriteRule("control_rz_commutation", _find_control_rz, _sample_control_rz, 2)
ZERO_ROTATION = RewriteRule("zero_rotation", _find_zero, _sample_zero)
FAN_LADDER = RewriteRule("fig2_fan_ladder", _find_fan, _sample_fan, 2)

RULES: dict[str, RewriteRule] = {
    r.name: r
    for r in (
        CP_DECOMPOSITION, SWAP_DECOMPOSITION, CRZ_DECOMPOSITION, CRY_TO_CRZ, CNOT_CANCELLATION,
        RZ_MERGE, RX_MERGE, CONTROL_RZ_COMMUTATION, ZERO_ROTATION, FAN_LADDER,
    )
}
SIMPLIFY_RULES = (ZERO_ROTATION, CNOT_CANCELLATION, RZ_MERGE, RX_MERGE, CONTROL_RZ_COMMUTATION)


# --- engine --------------------------------------------------------------------

def apply_match(c: Circuit, m: Match) -> Circuit:
    gates = list(c.gates)
    for idx in sorted(m.indices, reverse=True):
        del gates[idx]
    at = m.indices[0]
    gates[at:at] = m.replacement
    return c.with_gates(gates, m.phase_delta)


def apply_rule(c: Circuit, rule: RewriteRule, site: int) -> tuple[Circuit, bool]:
    """Apply ``rule`` anchored at gate index ``site``; unchanged circuit and False on no match."""
    if not 0 <= site < len(c.gates):
        return c, False
    m = rule.find(c.gates, site)
    if m is None:
        return c, False
    return apply_match(c, m), True


def apply_fig2_identity(c: Circuit, site: int) -> tuple[Circuit, bool]:
    return apply_rule(c, FAN_LADDER, site)


def rewrite_sweep(c: Circuit, rule: RewriteRule) -> tuple[Circuit, int]:
    """One left-to-right pass; replacements are not re-scanned."""
    gates = list(c.gates)
    phase = 0.0
    hits = 0
    i = 0
    while i < len(gates):
        m = rule.find(gates, i)
        if m is None:
            i += 1
            continue
        for idx in sorted(m.indices, reverse=True):
            del gates[idx]
        gates[i:i] = m.replacement
        phase += m.phase_delta
        hits += 1
        i += max(len(m.replacement), 1) if m.replacement else 0
    return c.with_gates(gates, phase), hits


def simplify(c: Circuit) -> Circuit:
    return _simplify(c)[0]


def _simplify(c: Circuit) -> tuple[Circuit, int]:
    total = 0
    while True:
        hits = 0
        for rule in SIMPLIFY_RULES:
            c, k = rewrite_sweep(c, rule)
            hits += k
        total += hits
        if not hits:
            return c, total


def decompose_cp_all(c: Circuit) -> Circuit:
    return rewrite_sweep(c.check(), CP_DECOMPOSITION)[0]


def decompose_swap_all(c: Circuit) -> Circuit:
    return rewrite_sweep(c.check(), SWAP_DECOMPOSITION)[0]


def fan_decompose(c: Circuit) -> tuple[Circuit, int]:
    """Rewrite every CP as a hub-targeted parity block, deferring linear Rz terms.

    CP(theta; control j, target i) becomes CNOT(i->j) Rz(j, -theta/2) CNOT(i->j)
    with hub ``i``; the two single-qubit Rz(theta/2) terms, and any explicit Rz,
    are carried forward on their wire until the next non-diagonal gate touching
    it (or the end of the circuit).  All moved gates are diagonal, so this is an
    exact rewrite; runs of CPs sharing a target become contiguous fans.
    """
    c.check()
    pending = [0.0] * c.n_qubits
    out: list[Gate] = []
    phase = 0.0
    hits = 0

    def flush(q):
        if pending[q] != 0.0:
            out.append(rz(q, pending[q]))
            pending[q] = 0.0

    for g in c.gates:
        if g.kind is GateKind.CP:
            hub, other, theta = g.target, g.control, g.angle
            pending[hub] += theta / 2
            pending[other] += theta / 2
            out += [cnot(hub, other), rz(other, -theta / 2), cnot(hub, other)]
            phase += theta / 4
            hits += 1
        elif g.kind is GateKind.RZ:
            pending[g.qubits[0]] += g.angle
        else:
            for q in g.qubits:
                flush(q)
            out.append(g)
    for q in range(c.n_qubits):
        flush(q)
    return c.with_gates(out, phase), hits


PASSES: dict[str, Callable[[Circuit], tuple[Circuit, int]]] = {
    "decompose_cp": lambda c: rewrite_sweep(c, CP_DECOMPOSITION),
    "decompose_swap": lambda c: rewrite_sweep(c, SWAP_DECOMPOSITION),
    "decompose_crz": lambda c: rewrite_sweep(c, CRZ_DECOMPOSITION),
    "cry_to_crz": lambda c: rewrite_sweep(c, CRY_TO_CRZ),
    "fan_decompose": fan_decompose,
    "fig2": lambda c: rewrite_sweep(c, FAN_LADDER),
    "simplify": _simplify,
}
STANDARD_PASSES = ("fan_decompose", "fig2", "simplify")


@dataclass(frozen=True)
class PassRecord:
    name: str
    before: dict[str, int]
    after: dict[str, int]
    matches: int


@dataclass(frozen=True)
class PipelineTrace:
    records: tuple[PassRecord, ...] = field(default_factory=tuple)

    def cnot_counts(self) -> list[int]:
        if not self.records:
            return []
        counts = [self.records[0].before.get("cx", 0)]
        counts += [r.after.get("cx", 0) for r in self.records]
        return counts


def run_pipeline(c: Circuit, passes: Sequence[str] = STANDARD_PASSES) -> tuple[Circuit, PipelineTrace]:
    unknown = [p for p in passes if p not in PASSES]
    if unknown:
        raise KeyError(f"unknown pass(es): {', '.join(unknown)}; known: {', '.join(PASSES)}")
    c.check()
    records = []
    for name in passes:
        before = count_gates(c).counts
        c, hits = PASSES[name](c)
        records.append(PassRecord(name, before, count_gates(c).counts, hits))
    return c, PipelineTrace(tuple(records))


# --- soundness harness ---------------------------------------------------------

_RANDOM_KINDS = (GateKind.H, GateKind.X, GateKind.RX, GateKind.RY, GateKind.RZ,
                 GateKind.CNOT, GateKind.CP, GateKind.CRZ, GateKind.CRY, GateKind.SWAP)


def random_gate(rng: np.random.Generator, n: int, kinds=_RANDOM_KINDS) -> Gate:
    if n < 2:
        kinds = [k for k in kinds if k.n_qubits == 1]
    kind = kinds[int(rng.integers(len(kinds)))]
    qubits = (int(rng.integers(n)),) if kind.n_qubits == 1 else _pair(rng, n)
    return Gate(kind, qubits, _angle(rng) if kind.parameterized else None)


def random_circuit(rng: np.random.Generator, n: int, n_gates: int, kinds=_RANDOM_KINDS) -> Circuit:
    return Circuit(n, tuple(random_gate(rng, n, kinds) for _ in range(n_gates)))


@dataclass(frozen=True)
class SoundnessReport:
    rule: str
    max_deviation: float
    per_size: dict[int, float]
    trials: int
    no_match: int
    tolerance: float = 1e-10

    @property
    def passed(self) -> bool:
        return self.no_match == 0 and self.max_deviation <= self.tolerance


def validate_rule(rule: RewriteRule, max_size: int = 5, trials: int = 200, seed: int = 0,
                  min_size: int = 2, tolerance: float = 1e-10) -> SoundnessReport:
    """Embed random LHS instances in random contexts, rewrite, and compare unitaries exactly."""
    if max_size > 6:
        raise ValueError("validate_rule supports register sizes up to 6")
    per_size: dict[int, float] = {}
    no_match = 0
    for n in range(max(min_size, rule.min_qubits), max_size + 1):
        worst = 0.0
        for trial in range(trials):
            rng = np.random.default_rng([seed, n, trial])
            prefix = [random_gate(rng, n) for _ in range(int(rng.integers(0, 4)))]
            suffix = [random_gate(rng, n) for _ in range(int(rng.integers(0, 4)))]
            lhs = rule.sample(rng, n)
            c = Circuit(n, tuple(prefix + lhs + suffix))
            m = rule.find(c.gates, len(prefix))
            if m is None:
                no_match += 1
                worst = math.inf
                continue
            dev = float(np.max(np.abs(circuit_unitary(apply_match(c, m)) - circuit_unitary(c))))
            worst = max(worst, dev)
        per_size[n] = worst
    max_dev = max(per_size.values()) if per_size else 0.0
    return SoundnessReport(rule.name, max_dev, per_size, trials, no_match, tolerance)
