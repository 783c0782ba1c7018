"""Nearest-neighbor QFT synthesis with n^2 + n - 4 CNOTs, verified against a dense oracle."""
from .circuit import (
    Circuit, Gate, GateCountReport, GateKind, compose, count_gates, invert, is_nearest_neighbor,
    validate_circuit,
)
from .qft import build_decomposed_qft, build_lnn_qft_baseline, build_lnn_qft_optimized, build_standard_qft
from .rewrite import decompose_cp_all, decompose_swap_all, run_pipeline, simplify
from .simulator import apply_circuit, circuit_unitary, permuted_equivalence, qft_matrix
from .textio import parse, serialize

__version__ = "0.1.0"
