"""Command-line harness.

Subcommands: run, generate, sample, xeb, bench, layout, figures.
Exit codes are a stable contract: 0 success, 2 parse error, 3 capacity,
4 I/O, 5 scoring policy.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .circuit import CapacityError, format_layout, grid_layout
from .engine import ErrorModel, run_circuit, sample
from .harness import (
    RunSpec,
    ScoringPolicyError,
    bench_sweep,
    bitstring_text,
    build_circuit,
    load_amplitudes,
    load_rcs_config,
    load_sweep_config,
    resolve_max_qubits,
    run,
    score_external,
    write_csv,
)
from .qasm import QasmError, emit_qasm
from .rcs import generate

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CAPACITY = 3
EXIT_IO = 4
EXIT_SCORING = 5


def _add_source_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--qasm", metavar="PATH", help="OpenQASM 2.0 circuit file")
    src.add_argument("--rcs-config", metavar="PATH", help="generator config file")


def _spec_from_args(args, out_dir=None) -> RunSpec:
    error_model = None
    if args.epsilon is not None:
        error_model = ErrorModel(args.epsilon, seed=args.error_seed)
    rcs = load_rcs_config(args.rcs_config) if args.rcs_config else None
    return RunSpec(
        qasm_path=args.qasm,
        rcs=rcs,
        k=args.k,
        seed=args.seed,
        error_model=error_model,
        out_dir=out_dir,
        record_amplitudes=getattr(args, "record_amplitudes", False),
        label=getattr(args, "label", None),
        max_qubits=args.max_qubits,
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="rcslab",
        description="Simulate random circuits, sample them, and verify with XEB.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_sampling=True):
        _add_source_args(p)
        if with_sampling:
            p.add_argument("--k", type=int, default=10000, help="samples to draw")
            p.add_argument("--seed", type=int, default=0, help="sampling seed")
        p.add_argument("--max-qubits", type=int, default=None,
                       help="capacity cap (default: RCSLAB_MAX_QUBITS or 30)")

    p = sub.add_parser("run", help="simulate, sample, score, persist a report")
    common(p)
    p.add_argument("--epsilon", type=float, default=None, help="per-gate Pauli error rate")
    p.add_argument("--error-seed", type=int, default=0)
    p.add_argument("--out", default="results", help="output directory")
    p.add_argument("--csv", default=None, help="also append a CSV (header + row)")
    p.add_argument("--label", default=None)
    p.add_argument("--record-amplitudes", action="store_true",
                   help="dump the full amplitude table (n <= 20 only)")

    p = sub.add_parser("generate", help="emit a generated circuit as OpenQASM")
    p.add_argument("--rcs-config", metavar="PATH", required=True)
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("sample", help="simulate and print sampled bitstrings")
    common(p)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--error-seed", type=int, default=0)
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("xeb", help="score external samples against an amplitude table")
    p.add_argument("--samples", required=True, metavar="PATH")
    p.add_argument("--amplitudes", required=True, metavar="PATH")
    p.add_argument("--n", type=int, default=None, help="bitstring width (hex tables)")
    p.add_argument("--strict-amplitudes", action="store_true",
                   help="fail on samples missing from the table instead of scoring p=0")

    p = sub.add_parser("bench", help="run a sweep config, write consolidated CSV")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--csv", required=True, metavar="PATH")
    p.add_argument("--figures", default=None, metavar="DIR",
                   help="also render report figures into DIR")

    p = sub.add_parser("layout", help="emit a grid coupler layout file")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--scheme", default="EFGH")
    p.add_argument("-o", "--out", default=None)

    p = sub.add_parser("figures", help="render figures from harness outputs")
    p.add_argument("--kind", required=True,
                   choices=["top_states", "pt_overlay", "xeb_vs_n", "time_vs_m"])
    p.add_argument("--csv", default=None, metavar="PATH")
    p.add_argument("--json", default=None, metavar="PATH")
    p.add_argument("-o", "--out", required=True, help="output image path")
    p.add_argument("--title", default=None)
    return ap


def _write_or_print(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_run(args) -> int:
    spec = _spec_from_args(args, out_dir=args.out)
    record = run(spec)
    if args.csv:
        write_csv([record], args.csv)
    print(
        f"{record.label}: n={record.n} gates={record.num_gates} k={record.k} "
        f"f_xeb={record.f_xeb:.6f} +/- {record.std_error:.6f} "
        f"pt_passed={record.pt_passed} t_first={record.time_to_first_sample_s:.3f}s"
    )
    return EXIT_OK


def _cmd_generate(args) -> int:
    circuit = generate(load_rcs_config(args.rcs_config))
    _write_or_print(emit_qasm(circuit), args.out)
    return EXIT_OK


def _cmd_sample(args) -> int:
    spec = _spec_from_args(args)
    circuit, _, _ = build_circuit(spec)
    state = run_circuit(circuit, spec.error_model, max_qubits=resolve_max_qubits(args.max_qubits))
    drawn = sample(state, spec.k, spec.seed)
    text = "".join(bitstring_text(b, circuit.n) + "\n" for b in drawn.bitstrings.tolist())
    _write_or_print(text, args.out)
    return EXIT_OK


def _cmd_xeb(args) -> int:
    table = load_amplitudes(args.amplitudes, n=args.n)
    report, missing = score_external(
        args.samples, table, n=args.n, strict=args.strict_amplitudes
    )
    if missing:
        print(f"warning: {missing} sample(s) missing from table, scored as p=0",
              file=sys.stderr)
    print(
        f"n={report.n} k={report.k} f_xeb={report.f_xeb:.6f} "
        f"std_error={report.std_error:.6f} std_dev={report.std_dev:.6f}"
    )
    return EXIT_OK


def _cmd_bench(args) -> int:
    specs = load_sweep_config(args.config)
    records = bench_sweep(specs, csv_path=args.csv, figures_dir=args.figures)
    failed = [r for r in records if r.status != "ok"]
    for r in failed:
        print(f"warning: {r.label}: {r.error}", file=sys.stderr)
    print(f"{len(records) - len(failed)}/{len(records)} runs ok -> {args.csv}")
    return EXIT_OK


def _cmd_layout(args) -> int:
    _write_or_print(format_layout(grid_layout(args.rows, args.cols, args.scheme)), args.out)
    return EXIT_OK


def _cmd_figures(args) -> int:
    from .figures import FigureSpec, render

    spec = FigureSpec(
        kind=args.kind,
        out_path=args.out,
        csv_path=args.csv,
        json_path=args.json,
        title=args.title,
    )
    for path in render(spec):
        print(path)
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "generate": _cmd_generate,
    "sample": _cmd_sample,
    "xeb": _cmd_xeb,
    "bench": _cmd_bench,
    "layout": _cmd_layout,
    "figures": _cmd_figures,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except QasmError as exc:
        for d in exc.diagnostics:
            print(d.render(exc.source_name), file=sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScoringPolicyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCORING
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
