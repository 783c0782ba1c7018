"""Greedy SWAP insertion onto a linear chain."""
from __future__ import annotations

from .circuit import Circuit, Gate, compose_permutations, swap


def route_to_lnn(c: Circuit) -> Circuit:
    """Move each non-adjacent gate's control toward its target with adjacent SWAPs.

    Swaps are never undone; the resulting relabeling is folded into the
    output permutation.
    """
    c.check()
    wire_of = list(range(c.n_qubits))
    on_wire = list(range(c.n_qubits))
    out: list[Gate] = []

    def do_swap(a, b):
        out.append(swap(a, b))
        qa, qb = on_wire[a], on_wire[b]
        on_wire[a], on_wire[b] = qb, qa
        wire_of[qa], wire_of[qb] = b, a

    for g in c.gates:
        if g.kind.n_qubits == 2:
            wc, wt = wire_of[g.qubits[0]], wire_of[g.qubits[1]]
            while abs(wc - wt) > 1:
                step = 1 if wt > wc else -1
                do_swap(wc, wc + step)
                wc += step
        out.append(Gate(g.kind, tuple(wire_of[q] for q in g.qubits), g.angle))
    perm = compose_permutations(c.output_permutation, wire_of)
    return Circuit(c.n_qubits, tuple(out), c.global_phase, perm)


def swaps_to_layout(current: list[int], desired: list[int]) -> list[Gate]:
    """Adjacent SWAPs (bubble sort) taking ``current`` to ``desired`` (both logical -> wire)."""
    n = len(current)
    on_wire = [0] * n
    for q, w in enumerate(current):
        on_wire[w] = q
    rank = {q: desired[q] for q in range(n)}
    gates = []
    for i in range(n):
        for w in range(n - 1 - i):
            if rank[on_wire[w]] > rank[on_wire[w + 1]]:
                gates.append(swap(w, w + 1))
                on_wire[w], on_wire[w + 1] = on_wire[w + 1], on_wire[w]
    return gates
