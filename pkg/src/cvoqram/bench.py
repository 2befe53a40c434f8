"""Random double-sparse datasets and the CNOT benchmark sweep.

Randomness comes from numpy's PCG64 bit generator seeded through
``SeedSequence``. A benchmark cell derives its own 64-bit seed from the base
seed and the cell key ``(n, M, density, trial)`` via ``SeedSequence`` spawn
keys, so every row can be regenerated alone with ``cvoqram gen --seed``.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .costmodel import predicted_cnot, reference_counts
from .decompose import lower_circuit
from .errors import ConfigError, SamplingSaturated, TooManyPatterns
from .simulator import DEFAULT_MAX_QUBITS, extract_memory, simulate, state_distance, target_state
from .stateprep import Dataset, load_dataset, synthesize

MAX_RESAMPLES = 10**6
_BATCH = 256

CSV_COLUMNS = (
    "algorithm", "n", "M", "density", "seed", "trial", "cnot", "single_qubit",
    "predicted_cnot", "ref_cvqram", "ref_ffqram", "ref_sql", "ref_mottonen",
    "distance", "leak", "synth_ms",
)


def generate_dataset(n: int, M: int, density: float, seed: int) -> Dataset:
    """``M`` distinct i.i.d. Bernoulli(density) patterns with Gaussian amplitudes.

    Duplicate patterns are redrawn. Amplitudes are complex standard normal,
    normalized to unit 2-norm.
    """
    if n < 1 or M < 1:
        raise ValueError("n and M must be >= 1")
    if M > 2**n:
        raise TooManyPatterns(f"cannot draw {M} distinct {n}-bit patterns")
    if not 0 < density < 1:
        raise ValueError(f"density must lie in (0, 1), got {density}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    patterns: list[str] = []
    seen: set[str] = set()
    rejected = 0
    while len(patterns) < M:
        block = rng.random((_BATCH, n)) < density
        for row in block:
            p = "".join("1" if b else "0" for b in row)
            if p in seen:
                rejected += 1
                if rejected > MAX_RESAMPLES:
                    raise SamplingSaturated(
                        f"gave up after {MAX_RESAMPLES} duplicate draws "
                        f"(n={n}, M={M}, density={density})"
                    )
                continue
            seen.add(p)
            patterns.append(p)
            if len(patterns) == M:
                break
    z = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    z /= math.sqrt(math.fsum((z.real**2 + z.imag**2).tolist()))
    return load_dataset(zip(z.tolist(), patterns), n=n, renormalize=True)


def derive_seed(seed: int, *key: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _density_key(density: float) -> int:
    return int(round(density * 1_000_000))


@dataclass(frozen=True)
class BenchConfig:
    algorithms: tuple[str, ...] = ("cvoqram",)
    n_values: tuple[int, ...] = (8,)
    patterns: tuple[int, ...] = (16,)
    densities: tuple[float, ...] = (0.5,)
    trials: int = 1
    seed: int = 0
    max_sim_qubits: int = DEFAULT_MAX_QUBITS

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        for a in self.algorithms:
            if a not in ("cvoqram", "cvqram"):
                raise ConfigError(f"unknown algorithm {a!r}")
        for d in self.densities:
            if not 0 < d < 1:
                raise ConfigError(f"density {d} outside (0, 1)")
        for n in self.n_values:
            if n < 1:
                raise ConfigError(f"n = {n} must be >= 1")
            for M in self.patterns:
                if not 1 <= M <= 2**n:
                    raise ConfigError(f"M = {M} patterns do not fit n = {n} bits")

    def cells(self):
        for n in sorted(self.n_values):
            for M in sorted(self.patterns):
                for density in sorted(self.densities):
                    for trial in range(self.trials):
                        yield n, M, density, trial


def _fmt_float(x: float) -> str:
    return f"{x:.6e}"


def run_bench(config: BenchConfig) -> list[dict]:
    datasets: dict[tuple, tuple[int, Dataset]] = {}
    rows = []
    for algorithm in sorted(config.algorithms):
        for n, M, density, trial in config.cells():
            key = (n, M, density, trial)
            if key not in datasets:
                cell_seed = derive_seed(config.seed, n, M, _density_key(density), trial)
                datasets[key] = (cell_seed, generate_dataset(n, M, density, cell_seed))
            cell_seed, d = datasets[key]

            start = time.perf_counter()
            lowered = lower_circuit(synthesize(d, algorithm))
            synth_ms = (time.perf_counter() - start) * 1e3

            counts = lowered.counts()
            refs = reference_counts(n)
            pred = predicted_cnot(algorithm, d)
            if lowered.num_qubits <= config.max_sim_qubits:
                mem, leak = extract_memory(simulate(lowered, max_qubits=config.max_sim_qubits), lowered.layout)
                distance = _fmt_float(state_distance(mem, target_state(d)))
                leak_s = _fmt_float(leak)
            else:
                distance = leak_s = "skipped"
            rows.append({
                "algorithm": algorithm,
                "n": n,
                "M": M,
                "density": repr(density),
                "seed": cell_seed,
                "trial": trial,
                "cnot": counts.cnot,
                "single_qubit": counts.single_qubit,
                "predicted_cnot": "" if pred is None else pred,
                "ref_cvqram": int(refs["cvqram"]),
                "ref_ffqram": int(refs["ffqram"]),
                "ref_sql": int(refs["sql"]),
                "ref_mottonen": int(refs["mottonen"]),
                "distance": distance,
                "leak": leak_s,
                "synth_ms": f"{synth_ms:.3f}",
            })
    return rows


def rows_to_csv(rows: Iterable[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def parse_int_range(text: str) -> tuple[int, ...]:
    """``"10..16"``, ``"3-5"``, ``"4"`` or ``"2,4,8"``."""
    values: list[int] = []
    for part in text.split(","):
        part = part.strip()
        for sep in ("..", "-"):
            if sep in part:
                lo, hi = part.split(sep, 1)
                values.extend(range(int(lo), int(hi) + 1))
                break
        else:
            values.append(int(part))
    return tuple(values)


def parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def split_names(values: Sequence[str]) -> tuple[str, ...]:
    out: list[str] = []
    for v in values:
        out.extend(s.strip() for s in v.split(",") if s.strip())
    return tuple(out)
