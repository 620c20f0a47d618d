"""Command-line entry point (``qspdc`` or ``python3 -m qspdc``)."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .circuit import Circuit
from .frontend import synthesize_initial
from .pipeline import OptimizeConfig, VerificationError, benchmark_csv, optimize, run_benchmark, verify
from .qasm import QasmError, from_qasm, to_qasm
from .simulator import load_state, save_state
from .states import FAMILIES, StateSpec

EXIT_OK, EXIT_VERIFY, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read_qasm(path: str) -> Circuit:
    try:
        return from_qasm(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _read_state(path: str):
    try:
        return load_state(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(f"{path}: {e}") from e


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_gen_state(a) -> int:
    spec = StateSpec(a.family, a.n, a.k, a.seed, a.uniform)
    save_state(spec.build(), a.output)
    return EXIT_OK


def cmd_synth(a) -> int:
    t = _read_state(a.input)
    _write(a.output, to_qasm(synthesize_initial(t, reduce_controls=not a.full_controls)))
    return EXIT_OK


def _table_sink(enabled: bool):
    return (lambda text: print(text, file=sys.stderr)) if enabled else None


def cmd_optimize(a) -> int:
    c = _read_qasm(a.input)
    target = _read_state(a.target) if a.target else None
    cfg = OptimizeConfig(k_max=a.kmax, use_cdc=not a.no_cdc, use_odc=not a.no_odc, tolerance=a.tol, iterations=a.iterations)
    try:
        out, report = optimize(c, cfg, target=target, sink=_table_sink(a.dump_tables))
    except VerificationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VERIFY
    _write(a.output, to_qasm(out))
    if a.report:
        Path(a.report).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n")
    print(f"cnots {report.cnot_before} -> {report.cnot_after} ({report.reduction_pct:.1f}% fewer), verified", file=sys.stderr)
    return EXIT_OK


def cmd_verify(a) -> int:
    c = _read_qasm(a.input)
    t = _read_state(a.target)
    if c.n_qubits != t.n_qubits:
        raise UsageError(f"circuit has {c.n_qubits} qubits, target has {t.n_qubits}")
    ok = verify(c, t, a.tol)
    print("ok" if ok else "MISMATCH")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(a) -> int:
    try:
        suite = json.loads(Path(a.suite).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {a.suite}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"{a.suite}: {e}") from e
    cfg = OptimizeConfig(k_max=a.kmax, use_cdc=not a.no_cdc, use_odc=not a.no_odc, iterations=a.iterations)
    try:
        results = run_benchmark(suite, cfg)
    except (KeyError, TypeError) as e:
        raise UsageError(f"bad suite description: {e}") from e
    _write(a.output, benchmark_csv(results))
    if a.json:
        Path(a.json).write_text(json.dumps(results, indent=2, sort_keys=True) + "\n")
    for name, f in sorted(results["families"].items()):
        print(f"{name:12s} n={f['count']:3d}  mean reduction {f['mean_reduction_pct']:6.2f}%", file=sys.stderr)
    return EXIT_OK if all(i["verified"] for i in results["instances"]) else EXIT_VERIFY


def _opt_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kmax", type=int, default=2, help="largest CNOT count tried per segment (0..4)")
    p.add_argument("--no-cdc", action="store_true", help="ignore zero-amplitude control states")
    p.add_argument("--no-odc", action="store_true", help="ignore unobservable entries")
    p.add_argument("--iterations", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qspdc", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-state", help="write a benchmark target state as JSON")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--uniform", action="store_true", help="equal amplitudes for random families")
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_gen_state)

    s = sub.add_parser("synth", help="initial cascade circuit for a state")
    s.add_argument("-i", "--input", required=True)
    s.add_argument("-o", "--output")
    s.add_argument("--full-controls", action="store_true", help="keep every control of every stage")
    s.set_defaults(func=cmd_synth)

    o = sub.add_parser("optimize", help="reduce the CNOT count of a circuit")
    o.add_argument("-i", "--input", required=True)
    o.add_argument("--target")
    _opt_flags(o)
    o.add_argument("--tol", type=float, default=1e-9)
    o.add_argument("-o", "--output")
    o.add_argument("--report")
    o.add_argument("--dump-tables", action="store_true", help="print rotation tables to stderr")
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("verify", help="check that a circuit prepares a state")
    v.add_argument("-i", "--input", required=True)
    v.add_argument("--target", required=True)
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="run a benchmark suite")
    b.add_argument("--suite", required=True)
    _opt_flags(b)
    b.add_argument("-o", "--output")
    b.add_argument("--json")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return a.func(a)
    except QasmError as e:
        print(f"error: {a.input}: {e}", file=sys.stderr)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_USAGE
