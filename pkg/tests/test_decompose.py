import math

import numpy as np
import pytest

from cvoqram.circuit import CU, CX, MCU, Circuit, QubitLayout, RPToffoli, U1q, X, gate_counts
from cvoqram.decompose import (
    expand, lower_circuit, lower_cu, lower_mcu, lower_rptoffoli, lowered_cnot_cost, plan_lowering,
    rptoffoli_blocks,
)
from cvoqram.errors import InsufficientAncillas, NonSpecialUnitary, OperandClash
from cvoqram.linalg import PAULI_X
from cvoqram.simulator import circuit_unitary
from cvoqram.stateprep import u_matrix

from conftest import controlled_matrix, random_su2


def _unitary(gates, nq):
    # circuit_unitary only needs a layout with nq total qubits
    c = Circuit(QubitLayout(n_memory=nq - 1), gates)
    return circuit_unitary(c)


TOFFOLI = controlled_matrix(3, [0, 1], 2, PAULI_X)


# -- relative-phase Toffoli ----------------------------------------------------------

def test_rptoffoli_has_three_cnots():
    for inv in (False, True):
        gates = lower_rptoffoli(RPToffoli(0, 1, 2, inv))
        counts = gate_counts(gates)
        assert counts.cnot == 3 and counts.other == 0
        assert all(type(g) in (CX, U1q) for g in gates)


def test_rptoffoli_forward_then_inverse_is_identity():
    gates = lower_rptoffoli(RPToffoli(0, 1, 2)) + lower_rptoffoli(RPToffoli(0, 1, 2, True))
    assert np.max(np.abs(_unitary(gates, 3) - np.eye(8))) < 1e-10


def test_rptoffoli_is_toffoli_times_diagonal():
    v = _unitary(lower_rptoffoli(RPToffoli(0, 1, 2)), 3)
    d = v @ TOFFOLI.conj().T
    assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-10
    assert np.allclose(np.abs(np.diag(d)), 1, atol=1e-10)


def test_rptoffoli_maps_110_to_phase_111():
    v = _unitary(lower_rptoffoli(RPToffoli(0, 1, 2)), 3)
    col = v[:, 0b110]
    assert abs(abs(col[0b111]) - 1) < 1e-12
    assert np.sum(np.abs(col) ** 2) - abs(col[0b111]) ** 2 < 1e-20


def test_rptoffoli_is_not_involutive():
    # the pairing contract only matters if forward twice != identity
    v = _unitary(lower_rptoffoli(RPToffoli(0, 1, 2)), 3)
    assert np.max(np.abs(v @ v - np.eye(8))) > 0.5


def test_rptoffoli_blocks_match_expansion():
    for inv in (False, True):
        v = _unitary(lower_rptoffoli(RPToffoli(0, 1, 2, inv)), 3)
        blocks = rptoffoli_blocks(inv)
        for (c1, c2), b in blocks.items():
            base = (c1 << 2) | (c2 << 1)
            sub = v[np.ix_([base, base | 1], [base, base | 1])]
            assert np.max(np.abs(sub - b)) < 1e-12


# -- controlled SU(2) ---------------------------------------------------------------

def test_lower_cu_half_amplitude():
    m = u_matrix(1 / math.sqrt(2), 1.0)
    gates = lower_cu(CU(0, 1, m))
    assert gate_counts(gates).cnot == 2 and len(gates) == 5
    assert np.max(np.abs(_unitary(gates, 2) - controlled_matrix(2, [0], 1, m))) < 1e-10


def test_lower_cu_identity():
    gates = lower_cu(CU(0, 1, np.eye(2)))
    assert np.max(np.abs(_unitary(gates, 2) - np.eye(4))) < 1e-10


def test_lower_cu_rejects_non_special():
    with pytest.raises(NonSpecialUnitary):
        lower_cu(CU(0, 1, np.diag([1, np.exp(1j * math.pi / 4)])))


@pytest.mark.parametrize("seed", range(25))
def test_lower_cu_random_su2(seed):
    rng = np.random.default_rng(seed)
    m = random_su2(rng)
    c, t = (1, 0) if seed % 2 else (0, 1)
    exact = controlled_matrix(2, [c], t, m)
    assert np.max(np.abs(_unitary(lower_cu(CU(c, t, m)), 2) - exact)) < 1e-10


@pytest.mark.parametrize("m", [-np.eye(2), np.array([[0, 1], [-1, 0]]), np.array([[0, 1j], [1j, 0]]),
                               np.diag([1j, -1j]), np.diag([-1j, 1j])])
def test_lower_cu_edge_matrices(m):
    exact = controlled_matrix(2, [0], 1, m)
    assert np.max(np.abs(_unitary(lower_cu(CU(0, 1, m)), 2) - exact)) < 1e-10


# -- ladders --------------------------------------------------------------------------

def _mcu_circuit(t, m):
    lay = QubitLayout(n_memory=t, n_work=max(t - 1, 0))
    return Circuit(lay, [MCU(tuple(lay.memory_qubits), lay.u, m)])


def _ancilla_zero_check(t, m, mutate=False):
    c = _mcu_circuit(t, m)
    lay = c.layout
    work = list(lay.work_qubits)
    gates = lower_mcu(c[0], work)
    if mutate:
        gates = [RPToffoli(g.c1, g.c2, g.target) if type(g) is RPToffoli else g for g in gates]
    lowered = Circuit(lay, expand(gates))
    w = t - 1
    cols = [b << w for b in range(1 << (t + 1))]
    got = circuit_unitary(lowered, cols)
    exact = controlled_matrix(t + 1, list(range(1, t + 1)), 0, m)
    e0 = np.zeros((1 << w, 1))
    e0[0] = 1
    want = np.kron(exact, e0)
    return np.max(np.abs(got - want)), got


@pytest.mark.parametrize("t", [1, 2, 3, 4, 5])
def test_ladder_exact_on_ancilla_zero_subspace(t):
    rng = np.random.default_rng(100 + t)
    for _ in range(4):
        err, got = _ancilla_zero_check(t, random_su2(rng))
        assert err < 1e-9
        # work ancillas are returned to |0>
        rows = np.arange(got.shape[0])
        leak = np.abs(got[(rows & ((1 << (t - 1)) - 1)) != 0]) ** 2
        assert leak.sum(axis=0).max() < 1e-12


@pytest.mark.parametrize("t", [2, 3, 4])
def test_unpaired_uncompute_breaks_equivalence(t):
    m = random_su2(np.random.default_rng(t))
    assert _ancilla_zero_check(t, m)[0] < 1e-9
    assert _ancilla_zero_check(t, m, mutate=True)[0] > 1e-3


def test_ladder_structure():
    m = u_matrix(0.3, 1.0)
    gates = lower_mcu(MCU((1, 2, 3, 4), 0, m), [5, 6, 7])
    rpt = [g for g in gates if type(g) is RPToffoli]
    assert len(rpt) == 6
    assert [g.inverse for g in rpt] == [False] * 3 + [True] * 3
    assert (rpt[0].c1, rpt[0].c2, rpt[0].target) == (1, 2, 5)
    assert (rpt[1].c1, rpt[1].c2, rpt[1].target) == (5, 3, 6)
    assert (rpt[2].c1, rpt[2].c2, rpt[2].target) == (6, 4, 7)
    assert [(g.c1, g.c2, g.target) for g in rpt[3:]] == [(g.c1, g.c2, g.target) for g in reversed(rpt[:3])]


def test_t1_delegates_to_cu():
    m = u_matrix(0.4, 1.0)
    assert lower_mcu(MCU((1,), 0, m), []) == lower_cu(CU(1, 0, m))


@pytest.mark.parametrize("t", range(1, 9))
def test_cnot_law_6t_minus_4(t):
    lowered = lower_circuit(_mcu_circuit(t, u_matrix(0.7, 1.0)))
    counts = gate_counts(lowered)
    assert counts.other == 0
    assert counts.cnot == 6 * t - 4


@pytest.mark.parametrize("t", range(2, 9))
def test_mcx_law_6t_minus_5(t):
    lowered = lower_circuit(_mcu_circuit(t, PAULI_X))
    assert gate_counts(lowered).cnot == 6 * t - 5


def test_c3x_matrix():
    err, _ = _ancilla_zero_check(3, PAULI_X)
    assert err < 1e-9


def test_plan_matches_lowering():
    c = _mcu_circuit(4, u_matrix(0.2, 1.0))
    c.append(CX(1, 2)).append(MCU((1, 2), 3, PAULI_X)).append(CU(1, 0, np.eye(2)))
    c.append(RPToffoli(1, 2, 5)).append(X(3))
    plan = plan_lowering(c)
    assert plan.work_ancillas_needed == 3
    assert plan.total_cnot == gate_counts(lower_circuit(c)).cnot
    assert [lowered_cnot_cost(g) for g in c] == list(plan.cnot_per_gate)


def test_lower_circuit_idempotent():
    lowered = lower_circuit(_mcu_circuit(3, u_matrix(0.7, 1.0)))
    assert lower_circuit(lowered) == lowered


def test_insufficient_ancillas():
    c = Circuit(QubitLayout(n_memory=3, n_work=1), [MCU((1, 2, 3), 0, np.eye(2))])
    with pytest.raises(InsufficientAncillas):
        lower_circuit(c)
    with pytest.raises(InsufficientAncillas):
        lower_mcu(c[0], [4])


def test_operand_clash():
    with pytest.raises(OperandClash):
        lower_mcu(MCU((1, 2, 3), 0, np.eye(2)), [3, 4])
