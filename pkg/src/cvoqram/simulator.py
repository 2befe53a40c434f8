"""Statevector simulation used as the correctness oracle.

Every gate type, including the un-lowered ``CU``/``MCU``/``RPToffoli``, is
applied exactly as a (possibly controlled) 2x2 action on its target, so the
abstract and the lowered form of a circuit can be simulated and compared.

Two kernels share that gate model:

* ``dense``: a ``2**q`` array updated in place through tensor views.
* ``sparse``: sorted (basis index, amplitude) arrays. State-preparation
  circuits keep only O(M) basis states populated, which makes the 20-qubit
  lowered circuits cheap to check. Amplitudes below ``SPARSE_PRUNE`` in
  magnitude (cancellation residue) are dropped.

Both produce a dense :class:`Statevector`. Basis index bit ``q - 1 - i`` holds
qubit ``i`` (qubit 0 is the most significant bit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .circuit import CU, CX, MCU, Circuit, Gate, QubitLayout, RPToffoli, U1q, X
from .decompose import rptoffoli_blocks
from .errors import DimensionMismatch, TooManyQubits
from .linalg import PAULI_X

DEFAULT_MAX_QUBITS = 24
SPARSE_PRUNE = 1e-14
_DENSE_AUTO_LIMIT = 14


@dataclass
class Statevector:
    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=complex)
        if self.amps.shape != (1 << self.n_qubits,):
            raise DimensionMismatch(
                f"{self.amps.shape} amplitudes for {self.n_qubits} qubits"
            )

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[0] = 1
        return cls(n_qubits, amps)

    def norm(self) -> float:
        # sequential sum: bit-reproducible across runs
        return math.sqrt(math.fsum((self.amps.real**2 + self.amps.imag**2).tolist()))

    def to_bytes(self) -> bytes:
        """Little-endian (re, im) float64 pairs in basis order."""
        return self.amps.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "Statevector":
        amps = np.frombuffer(data, dtype="<c16").astype(complex)
        n = int(amps.size).bit_length() - 1
        if amps.size != 1 << n:
            raise DimensionMismatch(f"{amps.size} amplitudes is not a power of two")
        return cls(n, amps)

    def to_text(self, threshold: float = 1e-12) -> str:
        lines = [f"# qubits {self.n_qubits}"]
        for i in np.flatnonzero(np.abs(self.amps) > threshold):
            z = self.amps[i]
            lines.append(f"{i} {z.real:.17g} {z.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Statevector":
        lines = text.splitlines()
        header = lines[0].split()
        if header[:2] != ["#", "qubits"]:
            raise ValueError("missing '# qubits <n>' header")
        sv = cls(int(header[2]), np.zeros(1 << int(header[2]), dtype=complex))
        for line in lines[1:]:
            if line.strip():
                i, re, im = line.split()
                sv.amps[int(i)] = complex(float(re), float(im))
        return sv


# -- gate model -------------------------------------------------------------------

# (target, 2x2 matrix, {control qubit: required value})
Action = tuple[int, np.ndarray, dict[int, int]]


def gate_actions(gate: Gate) -> list[Action]:
    kind = type(gate)
    if kind is X:
        return [(gate.target, PAULI_X, {})]
    if kind is CX:
        return [(gate.target, PAULI_X, {gate.control: 1})]
    if kind is U1q:
        return [(gate.target, gate.matrix, {})]
    if kind is CU:
        return [(gate.target, gate.matrix, {gate.control: 1})]
    if kind is MCU:
        return [(gate.target, gate.matrix, {c: 1 for c in gate.controls})]
    if kind is RPToffoli:
        blocks = rptoffoli_blocks(gate.inverse)
        return [
            (gate.target, blocks[(v1, v2)], {gate.c1: v1, gate.c2: v2})
            for v1 in (0, 1)
            for v2 in (0, 1)
        ]
    raise TypeError(f"not a gate: {gate!r}")


class DenseSimulator:
    def __init__(self, n_qubits: int, initial: np.ndarray | None = None):
        self.n_qubits = n_qubits
        if initial is None:
            psi = np.zeros(1 << n_qubits, dtype=complex)
            psi[0] = 1
        else:
            psi = np.array(initial, dtype=complex)
            if psi.shape != (1 << n_qubits,):
                raise DimensionMismatch(f"initial state has shape {psi.shape}")
        self._psi = psi.reshape((2,) * n_qubits) if n_qubits else psi

    def _act(self, target: int, m: np.ndarray, controls: dict[int, int]) -> None:
        # basic indexing only, so both halves are views into the state
        idx: list = [slice(None)] * self.n_qubits
        for c, v in controls.items():
            idx[c] = v
        idx[target] = 0
        i0 = tuple(idx)
        idx[target] = 1
        i1 = tuple(idx)
        psi = self._psi
        a0 = psi[i0].copy()
        if m[0, 0] == 0 and m[1, 1] == 0:
            psi[i0] = m[0, 1] * psi[i1] if m[0, 1] != 1 else psi[i1]
            psi[i1] = m[1, 0] * a0 if m[1, 0] != 1 else a0
            return
        a1 = psi[i1]
        psi[i0] = m[0, 0] * a0 + m[0, 1] * a1
        psi[i1] = m[1, 0] * a0 + m[1, 1] * a1

    def apply(self, gate: Gate) -> None:
        for target, m, controls in gate_actions(gate):
            self._act(target, m, controls)

    def statevector(self) -> Statevector:
        return Statevector(self.n_qubits, self._psi.reshape(-1).copy())


class SparseSimulator:
    def __init__(self, n_qubits: int, initial: np.ndarray | None = None):
        self.n_qubits = n_qubits
        if initial is None:
            self._idx = np.zeros(1, dtype=np.int64)
            self._amp = np.ones(1, dtype=complex)
        else:
            initial = np.asarray(initial, dtype=complex)
            if initial.shape != (1 << n_qubits,):
                raise DimensionMismatch(f"initial state has shape {initial.shape}")
            self._idx = np.flatnonzero(initial).astype(np.int64)
            self._amp = initial[self._idx]

    def _bit(self, q: int) -> int:
        return 1 << (self.n_qubits - 1 - q)

    def _act(self, target: int, m: np.ndarray, controls: dict[int, int]) -> None:
        cmask = cval = 0
        for c, v in controls.items():
            cmask |= self._bit(c)
            cval |= self._bit(c) * v
        tbit = self._bit(target)
        idx, amp = self._idx, self._amp
        if cmask:
            sel = (idx & cmask) == cval
            if not sel.any():
                return
            keep_idx, keep_amp = idx[~sel], amp[~sel]
            idx, amp = idx[sel], amp[sel]
        else:
            keep_idx = keep_amp = None

        hi = (idx & tbit) != 0
        if m[0, 1] == 0 and m[1, 0] == 0:
            new_idx, new_amp = idx, np.where(hi, m[1, 1], m[0, 0]) * amp
        elif m[0, 0] == 0 and m[1, 1] == 0:
            # |0> -> m[1,0] |1>, |1> -> m[0,1] |0>
            new_idx, new_amp = idx ^ tbit, np.where(hi, m[0, 1], m[1, 0]) * amp
        else:
            new_idx, new_amp = self._mix(idx, amp, hi, tbit, m)
            live = np.abs(new_amp) > SPARSE_PRUNE
            new_idx, new_amp = new_idx[live], new_amp[live]
        if keep_idx is not None:
            new_idx = np.concatenate((keep_idx, new_idx))
            new_amp = np.concatenate((keep_amp, new_amp))
        order = np.argsort(new_idx, kind="stable")
        self._idx, self._amp = new_idx[order], new_amp[order]

    @staticmethod
    def _mix(idx, amp, hi, tbit, m):
        base, inv = np.unique(idx & ~tbit, return_inverse=True)
        a0 = np.zeros(base.size, dtype=complex)
        a1 = np.zeros(base.size, dtype=complex)
        a0[inv[~hi]] = amp[~hi]
        a1[inv[hi]] = amp[hi]
        new_idx = np.concatenate((base, base | tbit))
        new_amp = np.concatenate((m[0, 0] * a0 + m[0, 1] * a1, m[1, 0] * a0 + m[1, 1] * a1))
        return new_idx, new_amp

    def apply(self, gate: Gate) -> None:
        for target, m, controls in gate_actions(gate):
            self._act(target, m, controls)

    @property
    def support(self) -> int:
        return int(self._idx.size)

    def statevector(self) -> Statevector:
        amps = np.zeros(1 << self.n_qubits, dtype=complex)
        amps[self._idx] = self._amp
        return Statevector(self.n_qubits, amps)


def simulate(
    circuit: Circuit,
    *,
    initial: Statevector | np.ndarray | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    method: str = "auto",
    callback: Callable[[int, Gate, "DenseSimulator | SparseSimulator"], None] | None = None,
) -> Statevector:
    """Apply ``circuit`` to ``initial`` (default |0...0>).

    ``callback(step, gate, sim)`` runs after each gate when given.
    """
    q = circuit.num_qubits
    if q > max_qubits:
        raise TooManyQubits(f"circuit has {q} qubits, simulator cap is {max_qubits}")
    if method == "auto":
        method = "dense" if q <= _DENSE_AUTO_LIMIT else "sparse"
    if isinstance(initial, Statevector):
        initial = initial.amps
    if method == "dense":
        sim: DenseSimulator | SparseSimulator = DenseSimulator(q, initial)
    elif method == "sparse":
        sim = SparseSimulator(q, initial)
    else:
        raise ValueError(f"unknown simulation method {method!r}")
    for step, gate in enumerate(circuit):
        sim.apply(gate)
        if callback is not None:
            callback(step, gate, sim)
    return sim.statevector()


def circuit_unitary(circuit: Circuit, columns: Iterable[int] | None = None) -> np.ndarray:
    """Dense matrix of the circuit (optionally only the given input columns)."""
    q = circuit.num_qubits
    cols = list(range(1 << q)) if columns is None else list(columns)
    out = np.empty((1 << q, len(cols)), dtype=complex)
    for j, col in enumerate(cols):
        e = np.zeros(1 << q, dtype=complex)
        e[col] = 1
        out[:, j] = simulate(circuit, initial=e, method="dense").amps
    return out


# -- dataset-level helpers -------------------------------------------------------------

def target_state(d) -> Statevector:
    """The amplitude-encoded state sum_k x_k |p_k> on the memory register."""
    amps = np.zeros(1 << d.n, dtype=complex)
    for x, p in d.entries:
        amps[int(p, 2)] = x
    return Statevector(d.n, amps)


def extract_memory(s: Statevector, layout: QubitLayout) -> tuple[Statevector, float]:
    """Memory sub-vector at all-zero ancillas, and the squared amplitude elsewhere."""
    if s.n_qubits != layout.total:
        raise DimensionMismatch(f"state has {s.n_qubits} qubits, layout {layout.total}")
    before = layout.memory_offset
    after = layout.n_work
    cube = s.amps.reshape(1 << before, 1 << layout.n_memory, 1 << after)
    mem = cube[0, :, 0].copy()
    weights = cube.real**2 + cube.imag**2
    weights[0, :, 0] = 0
    leak = math.fsum(weights.reshape(-1)[np.flatnonzero(weights)].tolist())
    return Statevector(layout.n_memory, mem), leak


def state_distance(a: Statevector, b: Statevector) -> float:
    """Largest componentwise complex difference."""
    if a.amps.shape != b.amps.shape:
        raise DimensionMismatch(f"{a.amps.shape} vs {b.amps.shape}")
    if a.amps.size == 0:
        return 0.0
    return float(np.max(np.abs(a.amps - b.amps)))


def overlap(a: Statevector, b: Statevector) -> float:
    """|<a|b>|."""
    if a.amps.shape != b.amps.shape:
        raise DimensionMismatch(f"{a.amps.shape} vs {b.amps.shape}")
    return abs(complex(np.vdot(a.amps, b.amps)))
