"""Benchmark harness: run specs end to end and persist scored results.

A run is: build the circuit (QASM file or generator config), simulate it,
sample k bitstrings, score them against the ideal state (XEB, entropies,
Porter-Thomas fit), and persist one CSV row, one JSON document and the raw
samples.  Timing is decomposed (parse, execution+first draw, total) so any
definition of "time to first sample" can be recovered; peak memory is
measured per run via tracemalloc when possible and otherwise estimated from
the amplitude-array size and flagged as such.

Scientific outputs are bit-for-bit reproducible for a fixed spec; wall
times and memory are the only fields allowed to differ between repeats.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import math
import os
import time
import tracemalloc
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from . import __version__ as _engine_version
from .circuit import CapacityError, Circuit, DeviceLayout, parse_layout, grid_layout
from .engine import DEFAULT_MAX_QUBITS, ErrorModel, run_circuit, sample
from .qasm import QasmError, lower_to_circuit, parse_qasm
from .rcs import RcsConfig, generate
from .xeb import XebReport, linear_xeb, porter_thomas_fit, shannon_entropy

AMP_DUMP_MAX_N = 20
PT_HIST_BINS = 40
PT_HIST_RANGE = (0.0, 8.0)
TOP_STATES = 10

CSV_COLUMNS = (
    "label",
    "n",
    "m",
    "num_gates",
    "k",
    "seed",
    "epsilon",
    "f_xeb",
    "std_error",
    "std_dev",
    "entropy_ideal",
    "cross_entropy_sampled",
    "entropy_uniform",
    "pt_ks",
    "pt_critical",
    "pt_passed",
    "time_to_first_sample_s",
    "total_wall_time_s",
    "parse_time_s",
    "peak_memory_bytes",
    "memory_estimated",
    "engine_version",
    "config_hash",
    "status",
    "error",
)

# Fields that must reproduce bit-for-bit across repeated runs of one spec.
SCIENTIFIC_FIELDS = (
    "label",
    "n",
    "m",
    "num_gates",
    "k",
    "seed",
    "epsilon",
    "f_xeb",
    "std_error",
    "std_dev",
    "entropy_ideal",
    "cross_entropy_sampled",
    "entropy_uniform",
    "pt_ks",
    "pt_critical",
    "pt_passed",
    "engine_version",
    "config_hash",
)


class ScoringPolicyError(RuntimeError):
    """A sampled bitstring violates the amplitude-table policy."""


class AmplitudeFormatError(ValueError):
    """An amplitude file line could not be parsed."""


def resolve_max_qubits(explicit: int | None = None) -> int:
    """Explicit cap, else the RCSLAB_MAX_QUBITS environment override, else 30."""
    if explicit is not None:
        return explicit
    env = os.environ.get("RCSLAB_MAX_QUBITS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"RCSLAB_MAX_QUBITS={env!r} is not an integer") from None
    return DEFAULT_MAX_QUBITS


@dataclass(frozen=True)
class RunSpec:
    """One experiment: exactly one circuit source plus sampling parameters."""

    qasm_path: str | None = None
    rcs: RcsConfig | None = None
    k: int = 10000
    seed: int = 0
    error_model: ErrorModel | None = None
    out_dir: str | None = None
    record_amplitudes: bool = False
    label: str | None = None
    max_qubits: int | None = None

    def __post_init__(self):
        if (self.qasm_path is None) == (self.rcs is None):
            raise ValueError("exactly one of qasm_path or rcs must be given")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass
class ResultRecord:
    label: str
    n: int
    m: int | None
    num_gates: int
    k: int
    seed: int
    epsilon: float | None
    f_xeb: float | None = None
    std_error: float | None = None
    std_dev: float | None = None
    entropy_ideal: float | None = None
    cross_entropy_sampled: float | None = None
    entropy_uniform: float | None = None
    pt_ks: float | None = None
    pt_critical: float | None = None
    pt_passed: bool | None = None
    time_to_first_sample_s: float | None = None
    total_wall_time_s: float | None = None
    parse_time_s: float | None = None
    peak_memory_bytes: int | None = None
    memory_estimated: bool = False
    engine_version: str = _engine_version
    config_hash: str = ""
    status: str = "ok"
    error: str = ""
    # not persisted to CSV; carried for JSON output and figure rendering
    top_states: list | None = None
    pt_histogram: dict | None = None

    def csv_row(self) -> list[str]:
        d = asdict(self)
        return [_csv_cell(d[c]) for c in CSV_COLUMNS]

    def scientific_fields(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in SCIENTIFIC_FIELDS}


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def config_hash(spec: RunSpec) -> str:
    """Stable digest of the fully resolved spec (file sources by content)."""
    src: dict = {}
    if spec.qasm_path is not None:
        digest = hashlib.sha256(Path(spec.qasm_path).read_bytes()).hexdigest()
        src = {"qasm_sha256": digest}
    else:
        cfg = spec.rcs
        src = {
            "layout_n": cfg.layout.n,
            "layout_edges": list(cfg.layout.edges),
            "m": cfg.m,
            "schedule": cfg.schedule,
            "rcs_seed": cfg.seed,
            "fsim_theta": cfg.fsim_theta,
            "fsim_phi": cfg.fsim_phi,
            "no_repeat_rule": cfg.no_repeat_rule,
        }
    payload = {
        "source": src,
        "k": spec.k,
        "seed": spec.seed,
        "epsilon": None if spec.error_model is None else spec.error_model.epsilon,
        "error_seed": None if spec.error_model is None else spec.error_model.seed,
        "fixed_error": None if spec.error_model is None else spec.error_model.fixed_error,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def build_circuit(spec: RunSpec) -> tuple[Circuit, str, float]:
    """Resolve the spec's source; returns (circuit, label, parse_seconds)."""
    t0 = time.perf_counter()
    if spec.qasm_path is not None:
        text = Path(spec.qasm_path).read_text()
        result = parse_qasm(text, name=str(spec.qasm_path))
        if not result.ok:
            raise QasmError(
                f"{spec.qasm_path}: {sum(d.severity == 'error' for d in result.diagnostics)} "
                "parse error(s)",
                result.diagnostics,
                result.name,
            )
        circuit = lower_to_circuit(result)
        label = spec.label or Path(spec.qasm_path).stem
    else:
        circuit = generate(spec.rcs)
        label = spec.label or spec.rcs.label
    return circuit, label, time.perf_counter() - t0


def bitstring_text(value: int, n: int) -> str:
    return format(value, f"0{n}b")


def run(spec: RunSpec) -> ResultRecord:
    """Execute one spec; raises QasmError / CapacityError / OSError on failure."""
    wall0 = time.perf_counter()
    circuit, label, parse_s = build_circuit(spec)
    max_q = resolve_max_qubits(spec.max_qubits)
    n = circuit.n

    started_tracing = False
    if not tracemalloc.is_tracing():
        tracemalloc.start()
        started_tracing = True
    tracemalloc.reset_peak()
    try:
        t0 = time.perf_counter()
        state = run_circuit(circuit, spec.error_model, max_qubits=max_q)
        sim_s = time.perf_counter() - t0

        t0 = time.perf_counter()
        sample(state, 1, spec.seed)
        first_draw_s = time.perf_counter() - t0
        samples = sample(state, spec.k, spec.seed)

        ideal = (
            state if spec.error_model is None else run_circuit(circuit, None, max_qubits=max_q)
        )
        probs = ideal.probabilities()
        vals = probs[samples.bitstrings]
        report = linear_xeb(vals, n)

        entropy_ideal = shannon_entropy(probs)
        positive = vals[vals > 0.0]
        if positive.size < vals.size:
            cross_sampled = math.inf
        else:
            cross_sampled = float(-np.mean(np.log(positive)))
        pt = porter_thomas_fit(probs)
        peak = tracemalloc.get_traced_memory()[1]
    finally:
        if started_tracing:
            tracemalloc.stop()

    record = ResultRecord(
        label=label,
        n=n,
        m=circuit.metadata.get("m"),
        num_gates=circuit.num_gates,
        k=spec.k,
        seed=spec.seed,
        epsilon=None if spec.error_model is None else spec.error_model.epsilon,
        f_xeb=report.f_xeb,
        std_error=report.std_error,
        std_dev=report.std_dev,
        entropy_ideal=entropy_ideal,
        cross_entropy_sampled=cross_sampled,
        entropy_uniform=n * math.log(2.0),
        pt_ks=pt.ks_statistic,
        pt_critical=pt.ks_critical,
        pt_passed=pt.passed,
        time_to_first_sample_s=sim_s + first_draw_s,
        parse_time_s=parse_s,
        peak_memory_bytes=int(peak),
        memory_estimated=False,
        config_hash=config_hash(spec),
    )

    counts: dict[int, int] = {}
    for b in samples.bitstrings.tolist():
        counts[b] = counts.get(b, 0) + 1
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:TOP_STATES]
    top_states = [[bitstring_text(b, n), c / spec.k] for b, c in top]

    pt_histogram = None
    if n <= 26:
        density, edges = np.histogram(
            probs * probs.size, bins=PT_HIST_BINS, range=PT_HIST_RANGE, density=True
        )
        pt_histogram = {"edges": edges.tolist(), "density": density.tolist()}

    record.top_states = top_states
    record.pt_histogram = pt_histogram
    record.total_wall_time_s = time.perf_counter() - wall0
    if spec.out_dir is not None:
        _persist(spec, record, samples, ideal)
    return record


def _persist(spec, record, samples, ideal_state):
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    n = record.n
    samples_path = out / f"{record.label}.samples.txt"
    with open(samples_path, "w") as fh:
        for b in samples.bitstrings.tolist():
            fh.write(bitstring_text(b, n) + "\n")
    fields = asdict(record)
    top_states = fields.pop("top_states")
    pt_histogram = fields.pop("pt_histogram")
    doc = {
        "record": fields,
        "samples_file": samples_path.name,
        "top_states": top_states,
        "pt_histogram": pt_histogram,
    }
    if spec.record_amplitudes and n <= AMP_DUMP_MAX_N:
        amps_path = out / f"{record.label}.amps.txt"
        dump_amplitudes(ideal_state, amps_path)
        doc["amplitudes_file"] = amps_path.name
    # json can't carry inf; encode as string
    if doc["record"]["cross_entropy_sampled"] == math.inf:
        doc["record"]["cross_entropy_sampled"] = "inf"
    with open(out / f"{record.label}.json", "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Amplitude tables


@dataclass(frozen=True)
class AmplitudeTable:
    """Bitstring -> ideal probability, optionally backed by raw amplitudes."""

    n: int
    probs: dict
    amplitudes: dict | None = None

    def probability(self, bitstring: int) -> float | None:
        return self.probs.get(bitstring)


def parse_bitstring(token: str, n: int | None, lineno: int) -> tuple[int, int | None]:
    """Parse a binary or 0x-hex bitstring; returns (value, inferred_width)."""
    if token.startswith(("0x", "0X")):
        try:
            return int(token, 16), None
        except ValueError:
            raise AmplitudeFormatError(f"line {lineno}: bad hex bitstring {token!r}") from None
    if not token or any(c not in "01" for c in token):
        raise AmplitudeFormatError(f"line {lineno}: bad bitstring {token!r}")
    return int(token, 2), len(token)


def load_amplitudes(path, n: int | None = None) -> AmplitudeTable:
    """Load a whitespace-delimited amplitude file.

    Two line formats, autodetected from the first data line and then
    enforced: ``<bitstring> <re> <im>`` or ``<bitstring> <prob>``.
    Bitstrings are binary text (width fixes n) or 0x-prefixed hex; ``#``
    comments are skipped.
    """
    probs: dict[int, float] = {}
    amps: dict[int, complex] = {}
    ncols = None
    width = n
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise AmplitudeFormatError(
                    f"{path}:{lineno}: expected 2 or 3 columns, got {len(parts)}"
                )
            if ncols is None:
                ncols = len(parts)
            elif len(parts) != ncols:
                raise AmplitudeFormatError(
                    f"{path}:{lineno}: mixed formats ({len(parts)} columns after {ncols})"
                )
            value, w = parse_bitstring(parts[0], width, lineno)
            if w is not None:
                if width is not None and w != width:
                    raise AmplitudeFormatError(
                        f"{path}:{lineno}: bitstring width {w} != {width}"
                    )
                width = w
            try:
                numbers = [float(p) for p in parts[1:]]
            except ValueError:
                raise AmplitudeFormatError(f"{path}:{lineno}: bad number") from None
            if not all(math.isfinite(x) for x in numbers):
                raise AmplitudeFormatError(f"{path}:{lineno}: non-finite value")
            if value in probs:
                raise AmplitudeFormatError(
                    f"{path}:{lineno}: duplicate bitstring {parts[0]}"
                )
            if ncols == 3:
                re, im = numbers
                amps[value] = complex(re, im)
                # same multiply-add order as the engine's probability kernels
                probs[value] = re * re + im * im
            else:
                if numbers[0] < 0.0 or numbers[0] > 1.0 + 1e-12:
                    raise AmplitudeFormatError(
                        f"{path}:{lineno}: probability {numbers[0]} outside [0, 1]"
                    )
                probs[value] = numbers[0]
    if not probs:
        raise AmplitudeFormatError(f"{path}: no data lines")
    if width is None:
        width = max(probs).bit_length() or 1
    too_wide = [v for v in probs if v >= (1 << width)]
    if too_wide:
        raise AmplitudeFormatError(
            f"{path}: bitstring {too_wide[0]:#x} out of range for n={width}"
        )
    return AmplitudeTable(width, probs, amps if ncols == 3 else None)


def dump_amplitudes(state, path) -> None:
    """Write every amplitude as '<bits> <re> <im>' (round-trips exactly)."""
    n = state.n
    with open(path, "w") as fh:
        for i, a in enumerate(state.amps.tolist()):
            fh.write(f"{bitstring_text(i, n)} {a.real!r} {a.imag!r}\n")


def read_samples(path, n: int) -> list[int]:
    """Read newline-delimited bitstrings (binary text or 0x hex)."""
    out = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            value, w = parse_bitstring(line, n, lineno)
            if w is not None and w != n:
                raise ScoringPolicyError(
                    f"{path}:{lineno}: sample width {w} does not match n={n}"
                )
            if value >= (1 << n):
                raise ScoringPolicyError(
                    f"{path}:{lineno}: sample {line} out of range for n={n}"
                )
            out.append(value)
    return out


def score_external(
    samples_path, table: AmplitudeTable, n: int | None = None, strict: bool = True
) -> tuple[XebReport, int]:
    """Score externally produced samples against an amplitude table.

    Returns the XEB report and the number of samples missing from the table
    (treated as p=0; only allowed when strict=False).
    """
    width = table.n if n is None else n
    if n is not None and n != table.n:
        raise ScoringPolicyError(f"requested n={n} but table is n={table.n}")
    bits = read_samples(samples_path, width)
    probs = []
    missing = 0
    for b in bits:
        p = table.probability(b)
        if p is None:
            if strict:
                raise ScoringPolicyError(
                    f"sample bitstring {bitstring_text(b, width)} absent from amplitude table"
                )
            missing += 1
            p = 0.0
        probs.append(p)
    return linear_xeb(np.asarray(probs), width), missing


# ---------------------------------------------------------------------------
# Sweeps


def bench_sweep(specs, csv_path=None, figures_dir=None) -> list[ResultRecord]:
    """Run every spec, tolerating per-spec failures; optionally write CSV/figures."""
    records: list[ResultRecord] = []
    for spec in specs:
        try:
            records.append(run(spec))
        except (QasmError, CapacityError, OSError, ScoringPolicyError, ValueError) as exc:
            records.append(_failure_record(spec, exc))
    if csv_path is not None:
        write_csv(records, csv_path)
    if figures_dir is not None and csv_path is not None:
        from . import figures

        figures.render_sweep(csv_path, _json_paths(specs, records), figures_dir)
    return records


def _failure_record(spec: RunSpec, exc: Exception) -> ResultRecord:
    label = spec.label or (Path(spec.qasm_path).stem if spec.qasm_path else spec.rcs.label)
    n = spec.rcs.layout.n if spec.rcs is not None else 0
    return ResultRecord(
        label=label,
        n=n,
        m=spec.rcs.m if spec.rcs is not None else None,
        num_gates=0,
        k=spec.k,
        seed=spec.seed,
        epsilon=None if spec.error_model is None else spec.error_model.epsilon,
        status="error",
        error=f"{type(exc).__name__}: {exc}",
    )


def _json_paths(specs, records):
    paths = []
    for spec, rec in zip(specs, records):
        if spec.out_dir is not None and rec.status == "ok":
            paths.append(Path(spec.out_dir) / f"{rec.label}.json")
    return paths


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.csv_row())


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# Config files (key = value sections; see README)


def _layout_from_section(section) -> DeviceLayout:
    if "file" in section:
        return parse_layout(Path(section["file"]).read_text())
    rows = section.getint("rows")
    cols = section.getint("cols")
    if rows is None or cols is None:
        raise ValueError("layout needs rows and cols (or file = <path>)")
    scheme = section.get("scheme", "EFGH")
    return grid_layout(rows, cols, scheme)


def load_rcs_config(path) -> RcsConfig:
    """Read a generator config: [layout] rows/cols/scheme|file, [circuit] m/..."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh, source=str(path))
    if "layout" not in cp or "circuit" not in cp:
        raise ValueError(f"{path}: needs [layout] and [circuit] sections")
    layout = _layout_from_section(cp["layout"])
    circ = cp["circuit"]
    if circ.getint("m") is None:
        raise ValueError(f"{path}: [circuit] needs m = <cycles>")
    return RcsConfig(
        layout=layout,
        m=circ.getint("m"),
        schedule=circ.get("schedule", "EFGH"),
        seed=circ.getint("seed", 0),
        fsim_theta=circ.getfloat("fsim_theta", RcsConfig.fsim_theta),
        fsim_phi=circ.getfloat("fsim_phi", RcsConfig.fsim_phi),
        no_repeat_rule=circ.getboolean("no_repeat_rule", False),
    )


def load_sweep_config(path) -> list[RunSpec]:
    """Read a sweep config: optional [defaults], then one [run:*] per spec."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh, source=str(path))
    defaults = cp["defaults"] if "defaults" in cp else {}
    specs = []
    for name in cp.sections():
        if not name.startswith("run"):
            continue
        sec = cp[name]

        def get(key, fallback=None):
            return sec.get(key, defaults.get(key, fallback))

        error_model = None
        eps = get("epsilon")
        if eps is not None:
            error_model = ErrorModel(float(eps), seed=int(get("error_seed", 0)))
        if get("qasm") is not None:
            source = {"qasm_path": get("qasm")}
        else:
            layout = (
                parse_layout(Path(get("layout_file")).read_text())
                if get("layout_file")
                else grid_layout(int(get("rows")), int(get("cols")), get("scheme", "EFGH"))
            )
            source = {
                "rcs": RcsConfig(
                    layout=layout,
                    m=int(get("m")),
                    schedule=get("schedule", "EFGH"),
                    seed=int(get("seed", 0)),
                    fsim_theta=float(get("fsim_theta", RcsConfig.fsim_theta)),
                    fsim_phi=float(get("fsim_phi", RcsConfig.fsim_phi)),
                    no_repeat_rule=str(get("no_repeat_rule", "false")).lower()
                    in ("1", "true", "yes", "on"),
                )
            }
        specs.append(
            RunSpec(
                **source,
                k=int(get("k", 10000)),
                seed=int(get("sample_seed", get("seed", 0))),
                error_model=error_model,
                out_dir=get("out"),
                record_amplitudes=str(get("record_amplitudes", "false")).lower()
                in ("1", "true", "yes", "on"),
                label=sec.get("label", name.split(":", 1)[1] if ":" in name else None),
                max_qubits=int(get("max_qubits")) if get("max_qubits") else None,
            )
        )
    if not specs:
        raise ValueError(f"{path}: no [run:*] sections")
    return specs
