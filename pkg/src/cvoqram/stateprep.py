"""Datasets of (amplitude, bit-pattern) pairs and the CVO-QRAM / CV-QRAM synthesizers.

Both synthesizers load one pattern per iteration. An ancilla splits the register
into a *processing* branch (ancilla = 1) carrying the not-yet-stored probability
mass ``gamma`` and *stored* branches (ancilla = 0). Each iteration rotates the
ancilla with :func:`u_matrix`, moving amplitude ``x_k`` into a new stored branch.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .circuit import CU, CX, MCU, Circuit, QubitLayout, U1q, X
from .errors import (
    AmplitudeExceedsGamma,
    GammaNotExhausted,
    DatasetError,
    DuplicatePattern,
    EmptyDataset,
    GammaUnderflow,
    InvalidPattern,
    LengthMismatch,
    NotNormalized,
)
from .linalg import PAULI_X

NORM_TOL = 1e-8
GAMMA_TOL = 1e-9
GAMMA_FLOOR = 1e-12
# slack for rounding accumulated by the gamma recurrence over many entries
_GAMMA_ABS_SLACK = 64 * np.finfo(float).eps
_RATIO_SNAP = 64 * np.finfo(float).eps


class DatasetWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Dataset:
    n: int
    entries: tuple[tuple[complex, str], ...]

    @property
    def M(self) -> int:
        return len(self.entries)

    @property
    def amplitudes(self) -> list[complex]:
        return [x for x, _ in self.entries]

    @property
    def patterns(self) -> list[str]:
        return [p for _, p in self.entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)


def _as_pattern(p: Any, index: int) -> str:
    if isinstance(p, str):
        s = p
    else:
        try:
            s = "".join(str(int(b)) for b in p)
        except (TypeError, ValueError):
            raise InvalidPattern(f"entry {index}: pattern {p!r} is not a bit string") from None
    if not s or set(s) - {"0", "1"}:
        raise InvalidPattern(f"entry {index}: pattern {p!r} is not a bit string")
    return s


def load_dataset(
    entries: Iterable[tuple[Any, Any]],
    *,
    n: int | None = None,
    renormalize: bool = False,
) -> Dataset:
    """Validate raw ``(amplitude, pattern)`` pairs.

    Patterns may be ``"0101"`` strings or bit sequences. Zero amplitudes are
    dropped with a :class:`DatasetWarning`. The surviving amplitudes are
    rescaled to unit norm; without ``renormalize`` an input whose norm is off
    by more than ``1e-8`` is rejected instead.
    """
    kept: list[tuple[complex, str]] = []
    seen: dict[str, int] = {}
    for i, (x, p) in enumerate(entries):
        s = _as_pattern(p, i)
        if n is None:
            n = len(s)
        if len(s) != n:
            raise LengthMismatch(f"entry {i}: pattern {s!r} has length {len(s)}, expected {n}")
        if s in seen:
            raise DuplicatePattern(f"entry {i}: pattern {s!r} repeats entry {seen[s]}")
        seen[s] = i
        try:
            z = complex(x)
        except (TypeError, ValueError):
            raise DatasetError(f"entry {i}: amplitude {x!r} is not a number") from None
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DatasetError(f"entry {i}: amplitude {x!r} is not finite")
        if z == 0:
            warnings.warn(f"entry {i}: dropping zero-amplitude pattern {s!r}", DatasetWarning, stacklevel=2)
            continue
        kept.append((z, s))
    if not kept:
        raise EmptyDataset("dataset has no nonzero amplitudes")

    norm = math.sqrt(math.fsum(abs(z) ** 2 for z, _ in kept))
    if not renormalize and abs(norm**2 - 1) > NORM_TOL:
        raise NotNormalized(f"amplitudes are not normalized: sum |x_k|^2 = {norm**2:.12g}, expected 1 within {NORM_TOL}")
    if norm != 1.0:
        kept = [(z / norm, s) for z, s in kept]
    return Dataset(n=n, entries=tuple(kept))


def dataset_to_dict(d: Dataset) -> dict:
    return {
        "n": d.n,
        "entries": [{"p": p, "re": x.real, "im": x.imag} for x, p in d.entries],
    }


def dataset_from_dict(obj: dict, *, renormalize: bool = False) -> Dataset:
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise DatasetError("dataset must be an object with 'n' and 'entries'")
    n = obj["n"]
    if not isinstance(n, int) or n < 1:
        raise DatasetError(f"'n' must be a positive integer, got {n!r}")
    raw = []
    for i, e in enumerate(obj["entries"]):
        if not isinstance(e, dict) or "p" not in e:
            raise DatasetError(f"entry {i}: expected an object with 'p', 're', 'im'")
        re, im = e.get("re", 0.0), e.get("im", 0.0)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            raise DatasetError(f"entry {i}: 're'/'im' must be numbers")
        if not isinstance(e["p"], str):
            raise InvalidPattern(f"entry {i}: 'p' must be a bit string")
        raw.append((complex(re, im), e["p"]))
    return load_dataset(raw, n=n, renormalize=renormalize)


def dumps_dataset(d: Dataset) -> str:
    return json.dumps(dataset_to_dict(d), indent=1) + "\n"


def read_dataset(path: str | Path, *, renormalize: bool = False) -> Dataset:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON ({exc})") from None
    return dataset_from_dict(obj, renormalize=renormalize)


def write_dataset(d: Dataset, path: str | Path) -> None:
    Path(path).write_text(dumps_dataset(d))


# -- pattern statistics ---------------------------------------------------------

def hamming_weight(p: str) -> int:
    return p.count("1")


def one_positions(p: str) -> list[int]:
    return [j for j, b in enumerate(p) if b == "1"]


def order_patterns(d: Dataset) -> Dataset:
    """Sort by Hamming weight, ties broken lexicographically."""
    entries = sorted(d.entries, key=lambda e: (hamming_weight(e[1]), e[1]))
    return Dataset(d.n, tuple(entries))


@dataclass(frozen=True)
class PatternStats:
    t: tuple[int, ...]
    l: tuple[tuple[int, ...], ...]
    t_max: int
    mu: dict[int, int] = field(default_factory=dict)


def pattern_stats(d: Dataset) -> PatternStats:
    weights = tuple(hamming_weight(p) for p in d.patterns)
    positions = tuple(tuple(one_positions(p)) for p in d.patterns)
    mu = Counter(t for t in weights if t > 0)
    return PatternStats(weights, positions, max(weights), dict(sorted(mu.items())))


# -- the rotation ---------------------------------------------------------------

def u_matrix(x: complex, gamma: float, *, exhaust: bool = False) -> np.ndarray:
    """Rotation that peels amplitude ``x`` off a branch holding mass ``gamma``.

    Acting on |1>, it leaves ``x / sqrt(gamma)`` on |0> and the real,
    non-negative remainder ``sqrt(1 - |x|^2/gamma)`` on |1>. The matrix is
    always special unitary.

    ``|x|^2 / gamma`` is snapped to 1 when it is within rounding of 1, or
    within ``1e-9`` when ``exhaust`` is set (the last pattern, which must
    empty the branch exactly).
    """
    if gamma <= GAMMA_FLOOR:
        raise GammaUnderflow(f"gamma = {gamma:.3e} is too small to load another amplitude")
    x = complex(x)
    mass = abs(x) ** 2
    if mass > gamma * (1 + GAMMA_TOL) + _GAMMA_ABS_SLACK:
        raise AmplitudeExceedsGamma(f"|x|^2 = {mass:.17g} exceeds gamma = {gamma:.17g}")
    ratio = mass / gamma
    window = GAMMA_TOL if exhaust else _RATIO_SNAP
    if exhaust and 1 - ratio > window and gamma - mass > _GAMMA_ABS_SLACK:
        raise GammaNotExhausted(
            f"last amplitude leaves gamma = {gamma - mass:.3e} unassigned"
        )
    off = x / math.sqrt(gamma)
    if ratio >= 1 - window or (exhaust and gamma - mass <= _GAMMA_ABS_SLACK):
        ratio = 1.0
        off = off / abs(off)
    a = math.sqrt(1 - ratio)
    return np.array([[a, off], [-off.conjugate(), a]], dtype=complex)


class GammaTracker:
    """The remaining-mass recurrence ``gamma_{k+1} = gamma_k - |x_k|^2``.

    Built with ``from_amplitudes`` the tracker reads each gamma off an
    exactly summed tail instead of subtracting; the two agree on normalized
    data but the subtraction cancels badly when one amplitude dominates.
    """

    def __init__(self) -> None:
        self.gamma = 1.0
        self.step = 0
        self._tails: list[float] | None = None

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "GammaTracker":
        masses = [abs(z) ** 2 for z in amplitudes]
        tr = cls()
        tr._tails = [math.fsum(masses[k:]) for k in range(len(masses))] + [0.0]
        tr.gamma = tr._tails[0]
        return tr

    def rotation(self, x: complex, *, last: bool = False) -> np.ndarray:
        """Rotation for amplitude ``x``; advances gamma (clamped to 0 at the end)."""
        m = u_matrix(x, self.gamma, exhaust=last)
        if self._tails is not None:
            self.step += 1
            self.gamma = self._tails[self.step]
            return m
        nxt = self.gamma - abs(x) ** 2
        if last:
            nxt = 0.0
        elif nxt < 0:
            if nxt < -(GAMMA_TOL + _GAMMA_ABS_SLACK):
                raise AmplitudeExceedsGamma(f"gamma would become {nxt:.3e}")
            nxt = 0.0
        self.gamma = nxt
        self.step += 1
        return m


# -- synthesizers ---------------------------------------------------------------

def cvoqram_layout(d: Dataset) -> QubitLayout:
    t_max = max(hamming_weight(p) for p in d.patterns)
    return QubitLayout(n_memory=d.n, has_u0=False, n_work=max(t_max - 1, 0))


def cvoqram_synthesize(d: Dataset, *, sort: bool = True) -> Circuit:
    """CVO-QRAM: one ``C^t U`` per pattern, ``t`` being its number of ones.

    ``sort=False`` skips the weight ordering. The result is then generally
    wrong; the switch exists to demonstrate that the ordering is required.
    """
    if sort:
        d = order_patterns(d)
    layout = cvoqram_layout(d)
    u = layout.u
    circuit = Circuit(layout)
    circuit.append(X(u))
    tracker = GammaTracker.from_amplitudes(d.amplitudes)
    last = d.M - 1
    for k, (x, p) in enumerate(d.entries):
        mem = [layout.memory(j) for j in one_positions(p)]
        for q in mem:
            circuit.append(CX(u, q))
        m = tracker.rotation(x, last=k == last)
        label = f"U{k}"
        if not mem:
            circuit.append(U1q(u, m, label))
        elif len(mem) == 1:
            circuit.append(CU(mem[0], u, m, label))
        else:
            circuit.append(MCU(tuple(mem), u, m, label))
        if k != last:
            for q in mem:
                circuit.append(CX(u, q))
    return circuit


def cvqram_layout(d: Dataset) -> QubitLayout:
    return QubitLayout(n_memory=d.n, has_u0=True, n_work=max(d.n - 1, 0))


def cvqram_synthesize(d: Dataset) -> Circuit:
    """CV-QRAM baseline: every pattern costs two ``C^n X`` plus a ``CU``.

    Qubit 0 plays the role of ``u1`` (the rotated ancilla) and qubit 1 is
    ``u0``; both end in |0> once the last pattern is stored.
    """
    layout = cvqram_layout(d)
    u1, u0 = layout.u, layout.u0
    mem = list(layout.memory_qubits)
    circuit = Circuit(layout)
    circuit.append(X(u1))
    tracker = GammaTracker.from_amplitudes(d.amplitudes)

    def flip_to_ones(p: str) -> None:
        for j, bit in enumerate(p):
            circuit.append(CX(u1, mem[j]) if bit == "1" else X(mem[j]))

    def mark() -> None:
        if len(mem) == 1:
            circuit.append(CX(mem[0], u0))
        else:
            circuit.append(MCU(tuple(mem), u0, PAULI_X, "X"))

    last = d.M - 1
    for k, (x, p) in enumerate(d.entries):
        flip_to_ones(p)
        mark()
        circuit.append(CU(u0, u1, tracker.rotation(x, last=k == last), f"U{k}"))
        mark()
        flip_to_ones(p)
    return circuit


SYNTHESIZERS = {"cvoqram": cvoqram_synthesize, "cvqram": cvqram_synthesize}


def synthesize(d: Dataset, algorithm: str = "cvoqram") -> Circuit:
    try:
        fn = SYNTHESIZERS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; choose from {sorted(SYNTHESIZERS)}") from None
    return fn(d)
