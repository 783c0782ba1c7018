"""Line-based circuit text format.

::

    qubits 3
    perm 2 1 0          # optional, default identity
    phase 0.25          # optional, default 0
    h 0
    cp 1 0 1.5707963267948966
    cx 0 1

Angles are written with ``repr`` so a round trip is bit-exact.
"""
from __future__ import annotations

import math

from .circuit import Circuit, Gate, GateKind, identity_permutation, is_permutation


class ParseError(ValueError):
    def __init__(self, line: int, token: str, message: str):
        self.line = line
        self.token = token
        super().__init__(f"line {line}: {message} (at {token!r})")


def serialize(c: Circuit) -> str:
    c.check()
    lines = [f"qubits {c.n_qubits}"]
    if c.output_permutation != identity_permutation(c.n_qubits):
        lines.append("perm " + " ".join(str(p) for p in c.output_permutation))
    if c.global_phase != 0.0:
        lines.append(f"phase {c.global_phase!r}")
    lines.extend(str(g) for g in c.gates)
    return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(lineno, tok, "expected an integer") from None


def _float(tok: str, lineno: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(lineno, tok, "expected a decimal angle") from None
    if not math.isfinite(val):
        raise ParseError(lineno, tok, "angle must be finite")
    return val


_MNEMONICS = {k.value: k for k in GateKind}


def parse(text: str) -> Circuit:
    n = None
    perm = None
    phase = 0.0
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        head, args = toks[0].lower(), toks[1:]
        if n is None:
            if head != "qubits" or len(args) != 1:
                raise ParseError(lineno, toks[0], "first statement must be 'qubits <n>'")
            n = _int(args[0], lineno)
            if n < 1:
                raise ParseError(lineno, args[0], "qubit count must be positive")
            continue
        if head == "qubits":
            raise ParseError(lineno, toks[0], "duplicate 'qubits' header")
        if head == "perm":
            if gates or perm is not None:
                raise ParseError(lineno, toks[0], "'perm' must precede gates and appear once")
            perm = tuple(_int(a, lineno) for a in args)
            if not is_permutation(perm, n):
                raise ParseError(lineno, toks[0], f"not a permutation of 0..{n - 1}")
            continue
        if head == "phase":
            if gates or len(args) != 1:
                raise ParseError(lineno, toks[0], "'phase' takes one value and must precede gates")
            phase = _float(args[0], lineno)
            continue
        kind = _MNEMONICS.get(head)
        if kind is None:
            raise ParseError(lineno, toks[0], "unknown gate mnemonic")
        arity = kind.n_qubits + (1 if kind.parameterized else 0)
        if len(args) != arity:
            raise ParseError(lineno, toks[0], f"'{head}' takes {arity} argument(s), got {len(args)}")
        qubits = tuple(_int(a, lineno) for a in args[: kind.n_qubits])
        for tok, q in zip(args, qubits):
            if not 0 <= q < n:
                raise ParseError(lineno, tok, f"qubit index out of range for {n} qubits")
        if kind.n_qubits == 2 and qubits[0] == qubits[1]:
            raise ParseError(lineno, args[1], "identical control/target")
        angle = _float(args[-1], lineno) if kind.parameterized else None
        gates.append(Gate(kind, qubits, angle))
    if n is None:
        raise ParseError(0, "", "empty circuit text")
    return Circuit(n, tuple(gates), phase, perm)


def load(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def dump(c: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(c))
