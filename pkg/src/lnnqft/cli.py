"""Command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import qft, report
from .circuit import count_gates, is_nearest_neighbor
from .qae import AOperatorSpec, run_qae
from .qpe import LAYOUTS, MAX_T, PhaseFraction, run_qpe
from .simulator import (
    CapacityError, DEFAULT_TOL, permuted_equivalence, qft_matrix, search_permutation, statevector_equivalence,
)
from .textio import ParseError, dump, load

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FULL_UNITARY_MAX = 8
STATEVECTOR_MAX = 10
SV_TOL = 1e-8

_PI_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)?)\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$")


def parse_angle(text: str) -> float:
    """Decimal radians, or multiples of pi such as ``pi/2``, ``-3*pi/4``."""
    s = text.strip().lower()
    try:
        return float(s)
    except ValueError:
        pass
    m = _PI_RE.match(s)
    if not m:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}")
    coef = m.group(1)
    k = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    return k * math.pi / (float(m.group(2)) if m.group(2) else 1.0)


def _phase(text: str) -> PhaseFraction:
    try:
        return PhaseFraction.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _write_jsonl(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")


def check_qft_circuit(c, n: int, perm_mode: str = "explicit"):
    """Return (passed, fidelity or max deviation, mode, permutation)."""
    if n <= FULL_UNITARY_MAX:
        target = qft_matrix(n)
        if perm_mode == "search":
            rep = search_permutation(c, target)
        else:
            rep = permuted_equivalence(c, target)
        return rep.passed, rep.fidelity, "unitary", rep.permutation
    dim = 2**n
    dev = statevector_equivalence(c, target_fn=lambda v: np.fft.ifft(v) * math.sqrt(dim))
    return dev <= SV_TOL, dev, "statevector", c.output_permutation


def cmd_synth(args) -> int:
    lo, hi = qft.FAMILY_RANGES[args.family]
    if not lo <= args.n <= hi:
        print(f"error: {args.family} supports {lo} <= n <= {hi} (capacity limit), got {args.n}", file=sys.stderr)
        return EXIT_USAGE
    c = qft.build(args.family, args.n)
    out = Path(args.out or f"qft-{args.family}-{args.n}.txt")
    dump(c, out)
    counts = count_gates(c)
    print(f"wrote {out}")
    print(f"qubits: {c.n_qubits}  gates: {len(c)}")
    print(f"CNOT: {counts.cnot_total}")
    print(f"counts: {counts.summary()}")
    print(f"LNN: {'yes' if is_nearest_neighbor(c) else 'no'}")

    ok = True
    if args.family.startswith("lnn") and not is_nearest_neighbor(c):
        ok = False
    if args.family == "lnn-optimized" and counts.cnot_total != args.n**2 + args.n - 4:
        ok = False
    if args.n <= STATEVECTOR_MAX:
        passed, score, mode, _ = check_qft_circuit(c, args.n)
        print(f"verification ({mode}): {score:.12g}")
        ok = ok and passed
    if not ok:
        print("error: post-build verification failed", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        c = load(args.circuit)
    except ParseError as exc:
        print(f"error: {args.circuit}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    n = c.n_qubits
    if args.n is not None and args.n != n:
        print(f"error: file declares {n} qubits, --n says {args.n}", file=sys.stderr)
        return EXIT_USAGE
    if n > STATEVECTOR_MAX or (args.perm == "search" and n > 6):
        print(f"error: verification of {n} qubits with --perm {args.perm} exceeds capacity", file=sys.stderr)
        return EXIT_USAGE
    try:
        passed, score, mode, perm = check_qft_circuit(c, n, args.perm)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    label = "fidelity" if mode == "unitary" else "max amplitude deviation"
    print(f"{label}: {score:.12f}")
    print(f"permutation: {' '.join(map(str, perm))}")
    print(f"LNN: {'yes' if is_nearest_neighbor(c) else 'no'}")
    print(f"CNOT: {count_gates(c).cnot_total}")
    tol = DEFAULT_TOL if mode == "unitary" else SV_TOL
    print(f"result: {'PASS' if passed else 'FAIL'} (tolerance {tol:g})")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_report(args) -> int:
    rows = report.table1_report()
    sys.stdout.write(report.render_text(rows))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "table1.jsonl").write_text(report.to_jsonl(rows), encoding="utf-8")
    if not args.no_figure:
        from .plotting import plot_table1
        plot_table1(rows, out_dir / "table1.png")
    try:
        expected = report.load_expected(args.expected) if args.expected else None
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read expected table: {exc}", file=sys.stderr)
        return EXIT_USAGE
    diffs = report.compare(rows, expected)
    if diffs:
        print("mismatch against expected table:", file=sys.stderr)
        for d in diffs:
            print(f"  {d}", file=sys.stderr)
        return EXIT_FAIL
    print(f"all cells match; records in {out_dir / 'table1.jsonl'}")
    return EXIT_OK


def cmd_qpe(args) -> int:
    if not 1 <= args.t <= MAX_T or args.shots < 1:
        print(f"error: need 1 <= t <= {MAX_T} and shots >= 1", file=sys.stderr)
        return EXIT_USAGE
    res = run_qpe(args.theta, args.t, args.shots, args.seed, args.layout)
    for k, v in sorted(res.histogram.items()):
        print(f"{k}: {v}")
    print(f"best outcome: {res.best_outcome:0{args.t}b}")
    print(f"success_rate: {res.success_rate}")
    _write_jsonl(res.records(), args.out)
    if args.figure:
        from .plotting import plot_histogram
        plot_histogram(res.histogram, args.figure, f"QPE theta={res.theta}, t={res.t}",
                       format(args.theta.nearest(args.t), f"0{args.t}b"))
    return EXIT_OK


def cmd_qae(args) -> int:
    spec = AOperatorSpec(args.theta_const, tuple(args.theta_linear))
    if not 1 <= args.M <= 6 or spec.n > 3 or args.shots < 1:
        print("error: need 1 <= M <= 6, at most 3 linear angles and shots >= 1", file=sys.stderr)
        return EXIT_USAGE
    res = run_qae(spec, args.M, args.shots, args.seed)
    a = spec.amplitude()
    for k, v in sorted(res.histogram.items()):
        print(f"{k}: {v}")
    print(f"y: {res.y}")
    print(f"a_hat: {res.a_hat:.12g}")
    print(f"a (exact): {a:.12g}")
    print(f"within-bound frequency: {res.within_bound_frequency(a):.6f}")
    _write_jsonl(res.records(), args.out)
    if args.figure:
        from .plotting import plot_histogram
        plot_histogram(res.histogram, args.figure, f"QAE M={args.M}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lnnqft", description="Nearest-neighbor QFT synthesis and verification.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="build a QFT circuit and write it to a file")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--family", choices=qft.FAMILIES, default="lnn-optimized")
    s.add_argument("--out", help="output path (default qft-<family>-<n>.txt)")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", help="check a circuit file against the QFT")
    v.add_argument("circuit")
    v.add_argument("--n", type=int)
    v.add_argument("--perm", choices=("explicit", "search"), default="explicit")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("report", help="reproduce the CNOT comparison table")
    r.add_argument("--out-dir", default=".")
    r.add_argument("--expected", help="JSON-lines file overriding the expected cells")
    r.add_argument("--no-figure", action="store_true")
    r.set_defaults(func=cmd_report)

    q = sub.add_parser("qpe", help="noiseless phase estimation of diag(1, e^{2 pi i theta})")
    q.add_argument("--theta", type=_phase, required=True, help="p/q or decimal in [0, 1)")
    q.add_argument("--t", type=int, default=3)
    q.add_argument("--shots", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--layout", choices=LAYOUTS, default="lnn")
    q.add_argument("--out", default="qpe-result.jsonl")
    q.add_argument("--figure")
    q.set_defaults(func=cmd_qpe)

    a = sub.add_parser("qae", help="canonical amplitude estimation of a controlled-Ry A-operator")
    a.add_argument("--theta-const", type=parse_angle, required=True)
    a.add_argument("--theta-linear", type=parse_angle, nargs="*", default=[])
    a.add_argument("--M", type=int, default=4)
    a.add_argument("--shots", type=int, default=1000)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--out", default="qae-result.jsonl")
    a.add_argument("--figure")
    a.set_defaults(func=cmd_qae)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
