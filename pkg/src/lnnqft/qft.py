"""Builders for the four QFT circuit families.

* ``standard``: H and CP gates, output in reversed qubit order.
* ``decomposed``: every CP as a CNOT/Rz parity block grouped into fans that share
  the freshly transformed qubit, all CNOTs long-range.
* ``lnn-baseline``: SWAP-interleaved nearest-neighbor QFT (each interaction is an
  adjacent CP followed by an adjacent SWAP), 5n(n-1)/2 CNOTs once decomposed.
* ``lnn-optimized``: nearest-neighbor QFT with n^2 + n - 4 CNOTs.
"""
from __future__ import annotations

import math

from .circuit import Circuit, Gate, cnot, compose_permutations, cp, h, reversal_permutation, rz, swap
from .rewrite import fan_decompose

FAMILIES = ("standard", "decomposed", "lnn-baseline", "lnn-optimized")
FAMILY_RANGES = {
    "standard": (1, 20),
    "decomposed": (2, 10),
    "lnn-baseline": (2, 10),
    "lnn-optimized": (2, 10),
}


def qft_angle(i: int, j: int) -> float:
    """Controlled-phase angle between qubits i < j: R_k with k = j - i + 1."""
    return 2 * math.pi / 2 ** (j - i + 1)


def _check_range(family: str, n: int) -> None:
    lo, hi = FAMILY_RANGES[family]
    if not isinstance(n, int) or not lo <= n <= hi:
        raise ValueError(f"{family} QFT supports {lo} <= n <= {hi}, got {n}")


def build_standard_qft(n: int) -> Circuit:
    _check_range("standard", n)
    gates: list[Gate] = []
    for i in range(n):
        gates.append(h(i))
        for j in range(i + 1, n):
            gates.append(cp(j, i, qft_angle(i, j)))
    return Circuit(n, tuple(gates), 0.0, reversal_permutation(n))


def build_decomposed_qft(n: int) -> Circuit:
    _check_range("decomposed", n)
    return fan_decompose(build_standard_qft(n))[0]


def build_lnn_qft_baseline(n: int) -> Circuit:
    _check_range("lnn-baseline", n)
    wire_of = list(range(n))      # logical qubit -> wire
    on_wire = list(range(n))      # wire -> logical qubit
    gates: list[Gate] = []
    for i in range(n):
        w = wire_of[i]
        gates.append(h(w))
        for j in range(i + 1, n):
            wj = wire_of[j]
            assert abs(wj - w) == 1
            gates += [cp(wj, w, qft_angle(i, j)), swap(w, wj)]
            on_wire[w], on_wire[wj] = j, i
            wire_of[i], wire_of[j] = wj, w
            w = wj
    perm = compose_permutations(reversal_permutation(n), wire_of)
    return Circuit(n, tuple(gates), 0.0, perm)


def build_lnn_qft_optimized(n: int) -> Circuit:
    """Nearest-neighbor QFT with exactly n^2 + n - 4 CNOTs.

    Wires below the active hub are kept difference-encoded (wire k holds
    q_{k-1} xor q_k, the first one clean). A CNOT ladder from the hub then turns
    every wire into hub xor q_k, the phase is applied, and the ladder is undone.
    Between rounds a single CNOT re-encodes the remaining wires for the next hub.
    """
    _check_range("lnn-optimized", n)
    gates: list[Gate] = [cnot(k - 1, k) for k in range(n - 1, 1, -1)]
    phase = 0.0
    for r in range(n):
        incoming = sum(qft_angle(i, r) for i in range(r)) / 2
        if incoming:
            gates.append(rz(r, incoming))
        gates.append(h(r))
        m = n - 1 - r
        if m == 0:
            continue
        angles = [qft_angle(r, r + k) for k in range(1, m + 1)]
        gates.append(rz(r, sum(angles) / 2))
        for k in range(1, m + 1):
            gates += [cnot(r + k - 1, r + k), rz(r + k, -angles[k - 1] / 2)]
        gates += [cnot(r + k - 1, r + k) for k in range(m, 0, -1)]
        if m >= 2:
            gates.append(cnot(r + 1, r + 2))
        phase += sum(angles) / 4
    return Circuit(n, tuple(gates), phase, reversal_permutation(n))


BUILDERS = {
    "standard": build_standard_qft,
    "decomposed": build_decomposed_qft,
    "lnn-baseline": build_lnn_qft_baseline,
    "lnn-optimized": build_lnn_qft_optimized,
}


def build(family: str, n: int) -> Circuit:
    try:
        builder = BUILDERS[family]
    except KeyError:
        raise ValueError(f"unknown QFT family {family!r}; choose from {', '.join(FAMILIES)}") from None
    return builder(n)
