"""Closed-form CNOT counts and their reconciliation with measured circuits."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional

from .circuit import Circuit, gate_counts
from .stateprep import Dataset, PatternStats, hamming_weight, pattern_stats


def cvo_sparse_count(stats: PatternStats) -> int:
    """sum_t mu_t (8t - 4) - t_max.

    Each pattern of weight t costs 2t CX plus 6t - 4 for the lowered C^t U;
    the restore CXs of the last (heaviest) pattern are skipped.
    """
    return sum(mu * (8 * t - 4) for t, mu in stats.mu.items()) - stats.t_max


def cvo_dense_count(n: int) -> int:
    """CVO-QRAM CNOTs for a dense n-qubit state (all 2^n patterns)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(comb(n, t) * (8 * t - 4) for t in range(1, n + 1)) - n


def cvo_dense_count_table_variant(n: int) -> int:
    """The 8t - 2 per-pattern variant printed in the reference table.

    Kept for comparison only; it disagrees with the constructive count.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(comb(n, t) * (8 * t - 2) for t in range(1, n + 1)) - n


def mcx_cnot_cost(t: int) -> int:
    if t < 1:
        raise ValueError("need at least one control")
    return 1 if t == 1 else 6 * t - 5


def cvqram_construction_count(d: Dataset) -> int:
    """CNOTs of this package's lowered CV-QRAM circuit for ``d``.

    Per pattern: one CX per 1-bit in each of the two flip loops, two C^n X and
    one 2-CNOT CU.
    """
    per_pattern = 2 * mcx_cnot_cost(d.n) + 2
    return sum(2 * hamming_weight(p) + per_pattern for p in d.patterns)


@dataclass(frozen=True)
class ReferenceValue:
    value: Fraction | int
    upper_bound: bool = False

    def __int__(self) -> int:
        return int(self.value)

    def as_json(self):
        v = self.value
        v = int(v) if isinstance(v, int) or v.denominator == 1 else float(v)
        return {"value": v, "upper_bound": self.upper_bound}


def reference_counts(n: int) -> dict[str, ReferenceValue]:
    """Published dense-state CNOT counts evaluated at ``n`` qubits."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = 2**n
    return {
        "cvoqram_table": ReferenceValue(cvo_dense_count_table_variant(n)),
        "cvqram": ReferenceValue(p * (8 * n - 2)),
        "ugd": ReferenceValue(Fraction(23, 24) * p, upper_bound=True),
        "sql": ReferenceValue(2 * p - 2 * n),
        "isometry": ReferenceValue(Fraction(23, 32) * p, upper_bound=True),
        "mottonen": ReferenceValue(4 * p - 4 * n - 4),
        "ffqram": ReferenceValue(p * (6 * n - 4)),
    }


def classical_cost_estimate(n: int, M: int) -> int:
    """Step proxy M*ceil(log2 M) + n*M for building the circuit."""
    if n < 1 or M < 1:
        raise ValueError("n and M must be >= 1")
    return M * (M - 1).bit_length() + n * M


@dataclass
class CostReport:
    algorithm: str
    n: int
    M: int
    cnot: int
    single_qubit: int
    predicted_cnot: Optional[int] = None
    references: dict[str, ReferenceValue] = field(default_factory=dict)

    @property
    def matches_prediction(self) -> bool:
        return self.predicted_cnot is None or self.predicted_cnot == self.cnot

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n": self.n,
            "M": self.M,
            "empirical": {"cnot": self.cnot, "single_qubit": self.single_qubit},
            "predicted_cnot": self.predicted_cnot,
            "references": {k: v.as_json() for k, v in self.references.items()},
        }


def predicted_cnot(algorithm: str, d: Dataset) -> Optional[int]:
    if algorithm == "cvoqram":
        return cvo_sparse_count(pattern_stats(d))
    return None


def cost_report(algorithm: str, d: Dataset, lowered: Circuit) -> CostReport:
    counts = gate_counts(lowered)
    if counts.other:
        raise ValueError("cost reports need a fully lowered circuit")
    return CostReport(
        algorithm=algorithm,
        n=d.n,
        M=d.M,
        cnot=counts.cnot,
        single_qubit=counts.single_qubit,
        predicted_cnot=predicted_cnot(algorithm, d),
        references=reference_counts(d.n),
    )
