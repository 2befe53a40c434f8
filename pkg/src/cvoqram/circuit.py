"""Gate-level intermediate representation.

Qubit layout convention (fixed, see :class:`QubitLayout`)::

    0            u   (rotation ancilla; u1 for CV-QRAM)
    1            u0  (CV-QRAM only)
    next n       memory qubit j <-> pattern bit j (bit 0 = leftmost character)
    remaining    work ancillas used by multi-control lowering

Basis-state indices treat qubit 0 as the most significant bit.

Text format, one gate per line after a ``QUBITS`` header::

    QUBITS <total> MEM <n> U0 <0|1> WORK <w>
    X t
    CX c t
    U1Q t <8 floats> [label]
    CU c t <8 floats> [label]
    MCU k c1 ... ck t <8 floats> [label]
    RPTOF c1 c2 t <0|1>

The eight floats are the row-major real/imag parts of the 2x2 matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import (
    DuplicateOperand,
    NonUnitaryMatrix,
    NotLowered,
    OperandOutOfRange,
    ParseError,
)
from .linalg import UNITARY_TOL, unitarity_error, zyz_angles

Matrix = tuple[complex, complex, complex, complex]


def _entries(matrix) -> Matrix:
    """Freeze a 2x2 matrix (array, nested lists or flat 4-tuple) into a tuple."""
    arr = np.asarray(matrix, dtype=complex).reshape(-1)
    if arr.shape != (4,):
        raise NonUnitaryMatrix(f"expected a 2x2 matrix, got {arr.size} entries")
    entries = tuple(complex(z) for z in arr)
    err = unitarity_error(np.array(entries).reshape(2, 2))
    if not err <= UNITARY_TOL:
        raise NonUnitaryMatrix(f"matrix is not unitary (max|M^dag M - I| = {err:.3e})")
    return entries  # type: ignore[return-value]


def _check_label(label: str) -> None:
    if any(ch.isspace() for ch in label):
        raise ValueError(f"gate label must not contain whitespace: {label!r}")


def _distinct(*qubits: int) -> None:
    for q in qubits:
        if q < 0:
            raise OperandOutOfRange(f"negative qubit index {q}")
    if len(set(qubits)) != len(qubits):
        raise DuplicateOperand(f"repeated operand in {qubits}")


class _MatrixGate:
    __slots__ = ()

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(2, 2)


@dataclass(frozen=True, slots=True)
class X:
    target: int

    def __post_init__(self):
        _distinct(self.target)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True, slots=True)
class CX:
    control: int
    target: int

    def __post_init__(self):
        _distinct(self.control, self.target)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True, slots=True)
class U1q(_MatrixGate):
    target: int
    entries: Matrix
    label: str = ""

    def __post_init__(self):
        _distinct(self.target)
        object.__setattr__(self, "entries", _entries(self.entries))
        _check_label(self.label)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True, slots=True)
class CU(_MatrixGate):
    control: int
    target: int
    entries: Matrix
    label: str = ""

    def __post_init__(self):
        _distinct(self.control, self.target)
        object.__setattr__(self, "entries", _entries(self.entries))
        _check_label(self.label)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


@dataclass(frozen=True, slots=True)
class MCU(_MatrixGate):
    """Apply ``matrix`` to ``target`` when every control qubit is 1."""

    controls: tuple[int, ...]
    target: int
    entries: Matrix
    label: str = ""

    def __post_init__(self):
        controls = tuple(int(c) for c in self.controls)
        if not controls:
            raise ValueError("MCU needs at least one control")
        if list(controls) != sorted(controls):
            raise ValueError(f"MCU controls must be sorted ascending: {controls}")
        object.__setattr__(self, "controls", controls)
        _distinct(*controls, self.target)
        object.__setattr__(self, "entries", _entries(self.entries))
        _check_label(self.label)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (*self.controls, self.target)


@dataclass(frozen=True, slots=True)
class RPToffoli:
    """Toffoli up to a relative phase; ``inverse`` marks the uncompute member."""

    c1: int
    c2: int
    target: int
    inverse: bool = False

    def __post_init__(self):
        _distinct(self.c1, self.c2, self.target)
        object.__setattr__(self, "inverse", bool(self.inverse))

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.c1, self.c2, self.target)


Gate = Union[X, CX, U1q, CU, MCU, RPToffoli]


@dataclass(frozen=True)
class QubitLayout:
    n_memory: int
    has_u0: bool = False
    n_work: int = 0

    def __post_init__(self):
        if self.n_memory < 1:
            raise ValueError("layout needs at least one memory qubit")
        if self.n_work < 0:
            raise ValueError("negative work-ancilla count")

    @property
    def total(self) -> int:
        return 1 + int(self.has_u0) + self.n_memory + self.n_work

    @property
    def u(self) -> int:
        return 0

    @property
    def u0(self) -> int:
        if not self.has_u0:
            raise AttributeError("layout has no u0 qubit")
        return 1

    @property
    def memory_offset(self) -> int:
        return 1 + int(self.has_u0)

    def memory(self, j: int) -> int:
        if not 0 <= j < self.n_memory:
            raise IndexError(j)
        return self.memory_offset + j

    @property
    def memory_qubits(self) -> range:
        return range(self.memory_offset, self.memory_offset + self.n_memory)

    @property
    def work_qubits(self) -> range:
        start = self.memory_offset + self.n_memory
        return range(start, start + self.n_work)

    def header(self) -> str:
        return (
            f"QUBITS {self.total} MEM {self.n_memory} "
            f"U0 {int(self.has_u0)} WORK {self.n_work}"
        )


class Circuit:
    """An append-only gate list over a :class:`QubitLayout`."""

    def __init__(self, layout: QubitLayout, gates: Iterable[Gate] = ()):
        self.layout = layout
        self._gates: list[Gate] = []
        for g in gates:
            self.append(g)

    def append(self, gate: Gate) -> "Circuit":
        total = self.layout.total
        for q in gate.qubits:
            if q >= total:
                raise OperandOutOfRange(f"qubit {q} outside layout of {total} qubits")
        self._gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    @property
    def gates(self) -> tuple[Gate, ...]:
        return tuple(self._gates)

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    def __len__(self) -> int:
        return len(self._gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self._gates)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return tuple(self._gates[i])
        return self._gates[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return self.layout == other.layout and self._gates == other._gates

    def __repr__(self) -> str:
        return f"Circuit({self.layout.header()}, {len(self._gates)} gates)"

    def counts(self) -> "GateCounts":
        return gate_counts(self)


@dataclass(frozen=True)
class GateCounts:
    cnot: int = 0
    single_qubit: int = 0
    other: int = 0

    @property
    def total(self) -> int:
        return self.cnot + self.single_qubit + self.other

    def as_dict(self) -> dict[str, int]:
        return {"cnot": self.cnot, "single_qubit": self.single_qubit, "other": self.other}


def gate_counts(circuit: Iterable[Gate]) -> GateCounts:
    cnot = single = other = 0
    for g in circuit:
        if type(g) is CX:
            cnot += 1
        elif type(g) in (X, U1q):
            single += 1
        else:
            other += 1
    return GateCounts(cnot, single, other)


def is_lowered(circuit: Iterable[Gate]) -> bool:
    return all(type(g) in (X, CX, U1q) for g in circuit)


# -- text serialization -------------------------------------------------------

def _fmt(x: float) -> str:
    return "%.17g" % x


def _fmt_entries(entries: Matrix) -> str:
    return " ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in entries)


def _with_label(line: str, label: str) -> str:
    return f"{line} {label}" if label else line


def emit_gate(g: Gate) -> str:
    if type(g) is X:
        return f"X {g.target}"
    if type(g) is CX:
        return f"CX {g.control} {g.target}"
    if type(g) is U1q:
        return _with_label(f"U1Q {g.target} {_fmt_entries(g.entries)}", g.label)
    if type(g) is CU:
        return _with_label(f"CU {g.control} {g.target} {_fmt_entries(g.entries)}", g.label)
    if type(g) is MCU:
        ctrl = " ".join(str(c) for c in g.controls)
        line = f"MCU {len(g.controls)} {ctrl} {g.target} {_fmt_entries(g.entries)}"
        return _with_label(line, g.label)
    if type(g) is RPToffoli:
        return f"RPTOF {g.c1} {g.c2} {g.target} {int(g.inverse)}"
    raise TypeError(f"not a gate: {g!r}")


def emit_text(circuit: Circuit) -> str:
    lines = [circuit.layout.header()]
    lines.extend(emit_gate(g) for g in circuit)
    return "\n".join(lines) + "\n"


def _ints(tokens: Sequence[str], lineno: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError as exc:
        raise ParseError(lineno, f"expected integer operand ({exc})") from None


def _matrix(tokens: Sequence[str], lineno: int) -> tuple[Matrix, str]:
    if len(tokens) < 8:
        raise ParseError(lineno, "expected 8 matrix floats")
    try:
        vals = [float(t) for t in tokens[:8]]
    except ValueError as exc:
        raise ParseError(lineno, f"bad matrix entry ({exc})") from None
    rest = tokens[8:]
    if len(rest) > 1:
        raise ParseError(lineno, "trailing tokens after label")
    entries = tuple(complex(vals[2 * i], vals[2 * i + 1]) for i in range(4))
    return entries, (rest[0] if rest else "")  # type: ignore[return-value]


def _parse_header(line: str) -> QubitLayout:
    tok = line.split()
    if len(tok) != 8 or tok[0::2] != ["QUBITS", "MEM", "U0", "WORK"]:
        raise ParseError(1, "expected 'QUBITS <total> MEM <n> U0 <0|1> WORK <w>'")
    total, n, u0, work = _ints(tok[1::2], 1)
    if u0 not in (0, 1):
        raise ParseError(1, "U0 flag must be 0 or 1")
    try:
        layout = QubitLayout(n_memory=n, has_u0=bool(u0), n_work=work)
    except ValueError as exc:
        raise ParseError(1, str(exc)) from None
    if layout.total != total:
        raise ParseError(1, f"QUBITS {total} disagrees with layout total {layout.total}")
    return layout


def parse_gate(line: str, lineno: int = 0) -> Gate:
    tok = line.split()
    op, args = tok[0], tok[1:]
    try:
        if op == "X":
            if len(args) != 1:
                raise ParseError(lineno, "X takes 1 operand")
            return X(*_ints(args, lineno))
        if op == "CX":
            if len(args) != 2:
                raise ParseError(lineno, "CX takes 2 operands")
            return CX(*_ints(args, lineno))
        if op == "U1Q":
            (t,) = _ints(args[:1], lineno)
            m, label = _matrix(args[1:], lineno)
            return U1q(t, m, label)
        if op == "CU":
            c, t = _ints(args[:2], lineno)
            m, label = _matrix(args[2:], lineno)
            return CU(c, t, m, label)
        if op == "MCU":
            (k,) = _ints(args[:1], lineno)
            if k < 1 or len(args) < k + 2:
                raise ParseError(lineno, "MCU control count does not match operands")
            ops = _ints(args[1 : k + 2], lineno)
            m, label = _matrix(args[k + 2 :], lineno)
            return MCU(tuple(ops[:k]), ops[k], m, label)
        if op == "RPTOF":
            if len(args) != 4:
                raise ParseError(lineno, "RPTOF takes c1 c2 t inv")
            c1, c2, t, inv = _ints(args, lineno)
            if inv not in (0, 1):
                raise ParseError(lineno, "RPTOF inverse flag must be 0 or 1")
            return RPToffoli(c1, c2, t, bool(inv))
    except ParseError:
        raise
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None
    raise ParseError(lineno, f"unknown gate {op!r}")


def parse_text(text: str) -> Circuit:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, "missing QUBITS header")
    circuit = Circuit(_parse_header(lines[0]))
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        gate = parse_gate(line, lineno)
        try:
            circuit.append(gate)
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
    return circuit


# -- OpenQASM 2.0 -------------------------------------------------------------

def u3_params(matrix: np.ndarray) -> tuple[float, float, float]:
    """Angles of ``u3(theta, phi, lam)`` equal to ``matrix`` up to global phase."""
    _, beta, gamma, delta = zyz_angles(matrix)
    return gamma, beta, delta


def emit_qasm2(circuit: Circuit) -> str:
    counts = gate_counts(circuit)
    if counts.other:
        raise NotLowered(f"{counts.other} multi-qubit gates remain; lower the circuit first")
    out = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.num_qubits}];",
    ]
    for g in circuit:
        if type(g) is CX:
            out.append(f"cx q[{g.control}],q[{g.target}];")
        elif type(g) is X:
            out.append(f"u3({_fmt(math.pi)},0,{_fmt(math.pi)}) q[{g.target}];")
        else:
            theta, phi, lam = u3_params(g.matrix)
            out.append(f"u3({_fmt(theta)},{_fmt(phi)},{_fmt(lam)}) q[{g.target}];")
    return "\n".join(out) + "\n"
