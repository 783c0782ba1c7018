"""Quantum phase estimation of U = diag(1, exp(2*pi*i*theta)) with eigenstate |1>.

Control qubit j carries phase weight 2^j.  Both layouts read the estimate of
2^t * theta from wires 0..t-1 as a big-endian bitstring; the eigenstate qubit
ends on wire t.  In the ``lnn`` layout the eigenstate qubit starts on wire 0
and is walked down the chain by the router.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circuit import Circuit, Gate, cp, embed, h, invert, x
from .qft import build_lnn_qft_optimized, build_standard_qft
from .routing import route_to_lnn, swaps_to_layout
from .simulator import apply_circuit, marginal_probabilities, zero_state

LAYOUTS = ("all2all", "lnn")
MAX_T = 8


@dataclass(frozen=True)
class PhaseFraction:
    """A phase theta in [0, 1), either an exact rational or a float."""

    value: Fraction | float

    def __post_init__(self):
        v = self.value
        if isinstance(v, int):
            v = Fraction(v)
        if not 0 <= v < 1:
            raise ValueError(f"phase must lie in [0, 1), got {v}")
        object.__setattr__(self, "value", v)

    @classmethod
    def parse(cls, text: str) -> "PhaseFraction":
        text = text.strip()
        if "/" in text:
            p, q = text.split("/", 1)
            return cls(Fraction(int(p), int(q)))
        try:
            return cls(Fraction(int(text)))
        except ValueError:
            return cls(float(text))

    @property
    def is_rational(self) -> bool:
        return isinstance(self.value, Fraction)

    def is_exact(self, t: int) -> bool:
        """True iff theta * 2^t is an integer."""
        return self.is_rational and (self.value * 2**t).denominator == 1

    def scaled_turn(self, k: int) -> Fraction | float:
        """(theta * k) mod 1."""
        v = self.value * k
        return v - math.floor(v)

    def nearest(self, t: int) -> int:
        """Nearest t-bit approximation of 2^t * theta, wrapped mod 2^t."""
        return int(round(self.value * 2**t)) % 2**t

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return str(self.value)


def build_controlled_power_u(theta: PhaseFraction, j: int, control: int, target: int) -> list[Gate]:
    """Controlled-U^(2^j) as a single CP; empty when the angle vanishes mod 2*pi."""
    if j < 0:
        raise ValueError("power index must be >= 0")
    turn = theta.scaled_turn(2**j)
    if turn == 0 or (not theta.is_rational and min(turn, 1 - turn) < 1e-15):
        return []
    return [cp(control, target, 2 * math.pi * float(turn))]


def inverse_qft_circuit(t: int, layout: str) -> Circuit:
    if t == 1 or layout == "all2all":
        return invert(build_standard_qft(t))
    return invert(build_lnn_qft_optimized(t))


def build_qpe_circuit(theta: PhaseFraction, t: int, layout: str = "all2all") -> Circuit:
    if not 1 <= t <= MAX_T:
        raise ValueError(f"QPE precision t must be in 1..{MAX_T}, got {t}")
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}, got {layout!r}")
    n = t + 1
    inv = embed(inverse_qft_circuit(t, layout), n)
    if layout == "all2all":
        gates = [x(t)] + [h(j) for j in range(t)]
        for j in range(t):
            gates += build_controlled_power_u(theta, j, j, t)
        return Circuit(n, tuple(gates) + inv.gates, inv.global_phase)

    # eigenstate on wire 0, control j on wire j + 1
    gates = [x(0)] + [h(j + 1) for j in range(t)]
    for j in range(t):
        gates += build_controlled_power_u(theta, j, 0, j + 1)
    routed = route_to_lnn(Circuit(n, tuple(gates)))
    desired = [t] + list(range(t))
    fixups = swaps_to_layout(list(routed.output_permutation), desired)
    return Circuit(n, routed.gates + tuple(fixups) + inv.gates, inv.global_phase, tuple(desired))


def qpe_distribution(theta: PhaseFraction, t: int, layout: str = "all2all") -> np.ndarray:
    """Exact outcome probabilities of the t-bit readout register."""
    c = build_qpe_circuit(theta, t, layout)
    sv = apply_circuit(zero_state(c.n_qubits), c)
    return marginal_probabilities(sv, c.n_qubits, t)


def nearest_outcome_probability(theta: float, t: int) -> float:
    """|sin(2^t pi d) / (2^t sin(pi d))|^2 with d the distance to the nearest grid point."""
    big = 2**t
    d = float(theta) - round(float(theta) * big) / big
    if abs(d) < 1e-15:
        return 1.0
    return (math.sin(big * math.pi * d) / (big * math.sin(math.pi * d))) ** 2


@dataclass(frozen=True)
class QPEResult:
    theta: str
    t: int
    shots: int
    seed: int
    layout: str
    histogram: dict[str, int] = field(default_factory=dict)
    best_outcome: int = 0
    success_rate: float = 0.0

    def records(self) -> list[dict]:
        head = {
            "theta": self.theta, "t": self.t, "shots": self.shots, "seed": self.seed,
            "layout": self.layout, "best_outcome": format(self.best_outcome, f"0{self.t}b"),
            "success_rate": self.success_rate,
        }
        return [head] + [{"outcome": k, "count": v} for k, v in sorted(self.histogram.items())]


def _draw(probs: np.ndarray, shots: int, seed: int, width: int) -> dict[str, int]:
    probs = np.clip(probs, 0, None)
    counts = np.random.default_rng(seed).multinomial(shots, probs / probs.sum())
    return {format(i, f"0{width}b"): int(k) for i, k in enumerate(counts) if k}


def run_qpe(theta: PhaseFraction, t: int, shots: int = 1000, seed: int = 0, layout: str = "all2all") -> QPEResult:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    hist = _draw(qpe_distribution(theta, t, layout), shots, seed, t)
    best = max(hist.items(), key=lambda kv: (kv[1], -int(kv[0], 2)))[0]
    target = format(theta.nearest(t), f"0{t}b")
    return QPEResult(str(theta), t, shots, seed, layout, hist, int(best, 2), hist.get(target, 0) / shots)
