"""Lowering of multi-controlled gates to CNOT + single-qubit gates.

A ``t``-controlled ``U`` (t >= 2) is expanded into the usual V-chain: ``t - 1``
work ancillas, ``2(t - 1)`` relative-phase Toffolis (3 CNOTs each) arranged as
compute/uncompute mirror pairs, and one central controlled gate driven by the
last work ancilla. The central gate is a 2-CNOT ``CU`` for special-unitary
matrices and a plain CX when the matrix is Pauli X, giving 6t - 4 and 6t - 5
CNOTs respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .circuit import CU, CX, MCU, Circuit, Gate, RPToffoli, U1q, X
from .errors import InsufficientAncillas, NonSpecialUnitary, OperandClash
from .linalg import IDENTITY, PAULI_X, PHASE_S, UNITARY_TOL, is_pauli_x, ry, rz, zyz_angles

# Margolus network on the target with an S phase folded into the last rotation.
# The fold keeps 3 CNOTs but makes the gate non-involutive, so an unpaired
# uncompute (forward gate used twice) is observable.
_RPT_STEPS: tuple[tuple[str, np.ndarray | None], ...] = (
    ("u", ry(math.pi / 4)),
    ("c2", None),
    ("u", ry(math.pi / 4)),
    ("c1", None),
    ("u", ry(-math.pi / 4)),
    ("c2", None),
    ("u", PHASE_S @ ry(-math.pi / 4)),
)


def _rpt_sequence(inverse: bool) -> list[tuple[str, np.ndarray | None]]:
    if not inverse:
        return list(_RPT_STEPS)
    return [(kind, None if m is None else m.conj().T) for kind, m in reversed(_RPT_STEPS)]


@lru_cache(maxsize=4096)
def _rpt_gates(gate: RPToffoli) -> tuple[Gate, ...]:
    out: list[Gate] = []
    for kind, m in _rpt_sequence(gate.inverse):
        if kind == "u":
            out.append(U1q(gate.target, m, "rpt"))
        else:
            out.append(CX(gate.c1 if kind == "c1" else gate.c2, gate.target))
    return tuple(out)


def lower_rptoffoli(gate: RPToffoli) -> list[Gate]:
    """Expand a relative-phase Toffoli into 3 CX and 4 target rotations."""
    # gates are immutable, so expansions of equal gates can be shared
    return list(_rpt_gates(gate))


@lru_cache(maxsize=2)
def _rpt_blocks(inverse: bool) -> dict[tuple[int, int], np.ndarray]:
    blocks = {}
    for c1 in (0, 1):
        for c2 in (0, 1):
            acc = IDENTITY.copy()
            for kind, m in _rpt_sequence(inverse):
                if kind == "u":
                    acc = m @ acc
                elif (kind == "c1" and c1) or (kind == "c2" and c2):
                    acc = PAULI_X @ acc
            acc.setflags(write=False)
            blocks[(c1, c2)] = acc
    return blocks


def rptoffoli_blocks(inverse: bool = False) -> dict[tuple[int, int], np.ndarray]:
    """Target-qubit action of the relative-phase Toffoli for each control value.

    ``blocks[(c1, c2)]`` is the 2x2 unitary applied to the target; it is
    diagonal unless ``c1 == c2 == 1``, where it is anti-diagonal.
    """
    return _rpt_blocks(bool(inverse))


def lower_cu(gate: CU) -> list[Gate]:
    """Two-CNOT realisation ``A . CX . B . CX . C`` of a controlled SU(2) gate."""
    m = gate.matrix
    det = complex(np.linalg.det(m))
    if abs(det - 1) > UNITARY_TOL:
        raise NonSpecialUnitary(f"controlled matrix has det {det:.12g}, expected 1")
    phase, beta, gamma, delta = zyz_angles(m)
    if abs(math.cos(phase) + 1) < 1e-6:
        # m = -Rz(beta) Ry Rz(delta) = Rz(beta + 2pi) Ry Rz(delta)
        beta += 2 * math.pi
    a = rz(beta) @ ry(gamma / 2)
    b = ry(-gamma / 2) @ rz(-(delta + beta) / 2)
    c = rz((delta - beta) / 2)
    t = gate.target
    return [
        U1q(t, c, "cu_c"),
        CX(gate.control, t),
        U1q(t, b, "cu_b"),
        CX(gate.control, t),
        U1q(t, a, "cu_a"),
    ]


def _central(control: int, target: int, gate: MCU) -> list[Gate]:
    if is_pauli_x(gate.matrix):
        return [CX(control, target)]
    return lower_cu(CU(control, target, gate.entries, gate.label))


def lower_mcu(gate: MCU, work: Sequence[int]) -> list[Gate]:
    """One level of lowering: RP-Toffoli ladder around a lowered central gate.

    The result holds CX, U1q and :class:`RPToffoli` gates; the Toffolis can be
    expanded further with :func:`lower_rptoffoli`.
    """
    controls = gate.controls
    t = len(controls)
    if t == 1:
        return _central(controls[0], gate.target, gate)
    if len(work) < t - 1:
        raise InsufficientAncillas(f"C^{t}U needs {t - 1} work ancillas, got {len(work)}")
    work = list(work[: t - 1])
    if len(set(work)) != len(work) or set(work) & set(gate.qubits):
        raise OperandClash(f"work ancillas {work} overlap gate operands {gate.qubits}")

    ladder = [RPToffoli(controls[0], controls[1], work[0])]
    for i in range(2, t):
        ladder.append(RPToffoli(work[i - 2], controls[i], work[i - 1]))
    uncompute = [RPToffoli(g.c1, g.c2, g.target, inverse=True) for g in reversed(ladder)]
    return [*ladder, *_central(work[-1], gate.target, gate), *uncompute]


def expand(gates: Iterable[Gate]) -> list[Gate]:
    out: list[Gate] = []
    for g in gates:
        if type(g) is RPToffoli:
            out.extend(lower_rptoffoli(g))
        else:
            out.append(g)
    return out


@dataclass(frozen=True)
class LoweringPlan:
    work_ancillas_needed: int
    cnot_per_gate: tuple[int, ...]

    @property
    def total_cnot(self) -> int:
        return sum(self.cnot_per_gate)


def lowered_cnot_cost(gate: Gate) -> int:
    """CNOTs this gate contributes after :func:`lower_circuit`."""
    kind = type(gate)
    if kind is CX:
        return 1
    if kind in (X, U1q):
        return 0
    if kind is CU:
        return 2
    if kind is RPToffoli:
        return 3
    t = len(gate.controls)
    central = 1 if is_pauli_x(gate.matrix) else 2
    return 6 * (t - 1) + central


def plan_lowering(circuit: Iterable[Gate]) -> LoweringPlan:
    need = 0
    costs = []
    for g in circuit:
        if type(g) is MCU:
            need = max(need, len(g.controls) - 1)
        costs.append(lowered_cnot_cost(g))
    return LoweringPlan(need, tuple(costs))


def lower_circuit(circuit: Circuit) -> Circuit:
    """Rewrite every gate into X, CX and U1q over the same layout."""
    plan = plan_lowering(circuit)
    work = list(circuit.layout.work_qubits)
    if plan.work_ancillas_needed > len(work):
        raise InsufficientAncillas(
            f"circuit needs {plan.work_ancillas_needed} work ancillas, "
            f"layout reserves {len(work)}"
        )
    out = Circuit(circuit.layout)
    for g in circuit:
        kind = type(g)
        if kind in (X, CX, U1q):
            out.append(g)
        elif kind is CU:
            out.extend(lower_cu(g))
        elif kind is MCU:
            out.extend(expand(lower_mcu(g, work)))
        else:
            out.extend(lower_rptoffoli(g))
    return out
