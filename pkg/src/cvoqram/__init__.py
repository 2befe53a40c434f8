"""Sparse quantum state preparation: CVO-QRAM and CV-QRAM circuit synthesis,
multi-control lowering, CNOT cost models and a statevector oracle."""

from .circuit import CU, CX, MCU, Circuit, GateCounts, QubitLayout, RPToffoli, U1q, X, emit_qasm2, emit_text, gate_counts, parse_text
from .costmodel import classical_cost_estimate, cvo_dense_count, cvo_sparse_count, reference_counts
from .decompose import lower_circuit, lower_cu, lower_mcu, lower_rptoffoli
from .simulator import Statevector, extract_memory, simulate, state_distance, target_state
from .stateprep import (
    Dataset,
    GammaTracker,
    cvoqram_synthesize,
    cvqram_synthesize,
    load_dataset,
    order_patterns,
    pattern_stats,
    u_matrix,
)

__all__ = [
    "CU", "CX", "MCU", "Circuit", "GateCounts", "QubitLayout", "RPToffoli", "U1q", "X",
    "emit_qasm2", "emit_text", "gate_counts", "parse_text",
    "classical_cost_estimate", "cvo_dense_count", "cvo_sparse_count", "reference_counts",
    "lower_circuit", "lower_cu", "lower_mcu", "lower_rptoffoli",
    "Statevector", "extract_memory", "simulate", "state_distance", "target_state",
    "Dataset", "GammaTracker", "cvoqram_synthesize", "cvqram_synthesize", "load_dataset",
    "order_patterns", "pattern_stats", "u_matrix",
]
