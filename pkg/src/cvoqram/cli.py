"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import BenchConfig, generate_dataset, parse_float_list, parse_int_range, rows_to_csv, run_bench, split_names
from .circuit import emit_qasm2, emit_text, parse_text
from .costmodel import cost_report, predicted_cnot
from .decompose import lower_circuit
from .errors import CvoqramError
from .simulator import DEFAULT_MAX_QUBITS, extract_memory, overlap, simulate, state_distance, target_state
from .stateprep import cvoqram_synthesize, cvqram_synthesize, dumps_dataset, read_dataset, synthesize

DISTANCE_TOL = 1e-9
LEAK_TOL = 1e-12

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _read_dataset(path):
    if path is None:
        raise InputError("--input is required")
    try:
        return read_dataset(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except CvoqramError as exc:
        raise InputError(f"{path}: {exc}") from None


def _write(path, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_gen(args) -> int:
    d = generate_dataset(args.n, args.patterns, args.density, args.seed)
    _write(args.output, dumps_dataset(d))
    return EXIT_OK


def cmd_synth(args) -> int:
    d = _read_dataset(args.input)
    circuit = synthesize(d, args.algorithm)
    if args.lower:
        circuit = lower_circuit(circuit)
    _write(args.output, emit_text(circuit))
    if args.qasm:
        if not args.lower:
            raise InputError("--qasm needs --lower")
        if args.output is None or args.output == "-":
            raise InputError("--qasm needs --output")
        Path(args.output).with_suffix(".qasm").write_text(emit_qasm2(circuit))
    counts = circuit.counts()
    parts = [f"{k}={v}" for k, v in counts.as_dict().items()]
    pred = predicted_cnot(args.algorithm, d)
    if pred is not None:
        parts.append(f"predicted={pred}")
    out = sys.stderr if args.output in (None, "-") else sys.stdout
    print(" ".join(parts), file=out)
    return EXIT_OK


def cmd_count(args) -> int:
    if args.input is None:
        raise InputError("--input is required")
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from None
    if text.lstrip().startswith("{"):
        d = _read_dataset(args.input)
        lowered = lower_circuit(synthesize(d, args.algorithm))
        print(json.dumps(cost_report(args.algorithm, d, lowered).to_dict(), indent=1))
    else:
        try:
            circuit = parse_text(text)
        except CvoqramError as exc:
            raise InputError(f"{args.input}: {exc}") from None
        print(json.dumps(circuit.counts().as_dict()))
    return EXIT_OK


def cmd_verify(args) -> int:
    d = _read_dataset(args.input)
    if args.algorithm == "cvoqram":
        circuit = cvoqram_synthesize(d, sort=not args.no_sort)
    else:
        circuit = cvqram_synthesize(d)
    lowered = lower_circuit(circuit)
    state = simulate(lowered, max_qubits=args.max_qubits)
    mem, leak = extract_memory(state, lowered.layout)
    target = target_state(d)
    distance = state_distance(mem, target)
    ok = distance < DISTANCE_TOL and leak < LEAK_TOL
    if args.dump:
        Path(args.dump).write_text(state.to_text())
    print(
        f"algorithm={args.algorithm} qubits={lowered.num_qubits} cnot={lowered.counts().cnot} "
        f"distance={distance:.3e} leak={leak:.3e} overlap={overlap(target, mem):.12f} "
        f"{'PASS' if ok else 'FAIL'}"
    )
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_bench(args) -> int:
    try:
        config = BenchConfig(
            algorithms=split_names(args.algorithm or ["cvoqram"]),
            n_values=parse_int_range(args.n),
            patterns=parse_int_range(args.patterns),
            densities=parse_float_list(args.density),
            trials=args.trials,
            seed=args.seed,
            max_sim_qubits=args.max_qubits,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _write(args.csv, rows_to_csv(run_bench(config)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvoqram", description="Compile amplitude-encoded datasets into CNOT-counted state-preparation circuits."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random dataset (JSON)")
    p.add_argument("--n", type=int, required=True, help="pattern length in bits")
    p.add_argument("--patterns", "-M", type=int, required=True, help="number of patterns M")
    p.add_argument("--density", type=float, default=0.5, help="probability of a 1 bit")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("synth", help="synthesize a circuit from a dataset")
    p.add_argument("--input", "-i")
    p.add_argument("--output", "-o")
    p.add_argument("--algorithm", choices=["cvoqram", "cvqram"], default="cvoqram")
    p.add_argument("--lower", action="store_true", help="lower to CX + single-qubit gates")
    p.add_argument("--qasm", action="store_true", help="also write <output>.qasm (needs --lower)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("count", help="CNOT counts for a dataset or a circuit file")
    p.add_argument("--input", "-i")
    p.add_argument("--algorithm", choices=["cvoqram", "cvqram"], default="cvoqram")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="synthesize, lower, simulate and compare with the target")
    p.add_argument("--input", "-i")
    p.add_argument("--algorithm", choices=["cvoqram", "cvqram"], default="cvoqram")
    p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS)
    p.add_argument("--dump", help="write the final statevector as 'idx re im' lines")
    p.add_argument("--no-sort", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="CNOT benchmark sweep, CSV output")
    p.add_argument("--algorithm", action="append", help="cvoqram, cvqram (repeatable or comma list)")
    p.add_argument("--n", default="8", help="qubit range, e.g. 10..16")
    p.add_argument("--patterns", "-M", default="16", help="pattern counts M, e.g. 16 or 4,8,16")
    p.add_argument("--density", default="0.5", help="comma list of ones-densities")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-qubits", type=int, default=DEFAULT_MAX_QUBITS,
                   help="simulate rows up to this many qubits, skip the rest")
    p.add_argument("--csv", "--output", "-o", dest="csv")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CvoqramError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
