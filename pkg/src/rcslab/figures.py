"""Render benchmark outputs as figures: never recomputes any statistics.

Four figure kinds, all fed from harness CSV/JSON files:

* top_states  - bar chart of the ten most frequent sampled bitstrings
* pt_overlay  - histogram of N*p against the exp(-u) reference and the
                uniform-distribution marker, plus a machine-checkable
                ``<figure>.deviations.txt`` sidecar
* xeb_vs_n    - XEB estimates vs qubit count with sample-std error bars
* time_vs_m   - time to first sample vs cycle count

Rendering is deterministic for fixed inputs (no RNG, no timestamps).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import read_csv

FIGURE_KINDS = ("top_states", "pt_overlay", "xeb_vs_n", "time_vs_m")

_DPI = 120


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    out_path: str
    csv_path: str | None = None
    json_path: str | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r} (have {FIGURE_KINDS})")


def render(spec: FigureSpec) -> list[str]:
    """Render one figure; returns the paths written (figure, then sidecars)."""
    if spec.kind in ("xeb_vs_n", "time_vs_m"):
        if spec.csv_path is None:
            raise ValueError(f"{spec.kind} needs a csv_path")
        rows = read_csv(spec.csv_path)
        fig = _xeb_vs_n(rows, spec.title) if spec.kind == "xeb_vs_n" else _time_vs_m(rows, spec.title)
        return [_save(fig, spec.out_path)]
    if spec.json_path is None:
        raise ValueError(f"{spec.kind} needs a json_path")
    doc = json.loads(Path(spec.json_path).read_text())
    if spec.kind == "top_states":
        fig = _top_states(doc, spec.title)
        return [_save(fig, spec.out_path)]
    fig, sidecar_text = _pt_overlay(doc, spec.title)
    out = _save(fig, spec.out_path)
    sidecar = out + ".deviations.txt"
    Path(sidecar).write_text(sidecar_text)
    return [out, sidecar]


def _save(fig, out_path: str) -> str:
    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Date": None} if path.suffix == ".svg" else None
    fig.savefig(path, dpi=_DPI, metadata=metadata)
    plt.close(fig)
    return str(path)


def _column(rows: list[dict], name: str) -> list[str]:
    if rows and name not in rows[0]:
        raise ValueError(f"missing column {name!r} in CSV input")
    return [r[name] for r in rows]


def _ok_rows(rows: list[dict]) -> list[dict]:
    if rows and "status" not in rows[0]:
        raise ValueError("missing column 'status' in CSV input")
    return [r for r in rows if r["status"] == "ok"]


def _xeb_vs_n(rows: list[dict], title: str | None):
    ok = _ok_rows(rows)
    for col in ("n", "f_xeb", "std_dev"):
        _column(ok, col)
    pts = sorted(
        (int(r["n"]), float(r["f_xeb"]), float(r["std_dev"])) for r in ok if r["f_xeb"]
    )
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if pts:
        ns, f, sd = zip(*pts)
        ax.errorbar(ns, f, yerr=sd, fmt="o-", capsize=3, color="tab:red", label="measured")
    ax.axhline(1.0, color="gray", lw=0.8, ls="--", label="noiseless limit")
    ax.axhline(0.0, color="gray", lw=0.8, ls=":")
    ax.set_xlabel("qubits n")
    ax.set_ylabel("linear XEB")
    ax.set_title(title or "Linear XEB vs circuit width")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def _time_vs_m(rows: list[dict], title: str | None):
    ok = _ok_rows(rows)
    for col in ("m", "time_to_first_sample_s"):
        _column(ok, col)
    pts = sorted(
        (int(r["m"]), float(r["time_to_first_sample_s"]))
        for r in ok
        if r["m"] and r["time_to_first_sample_s"]
    )
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if pts:
        ms, ts = zip(*pts)
        ax.plot(ms, ts, "o-", color="tab:blue")
    ax.set_xlabel("cycles m")
    ax.set_ylabel("time to first sample [s]")
    ax.set_title(title or "Time to first sample vs depth")
    fig.tight_layout()
    return fig


def _top_states(doc: dict, title: str | None):
    top = doc.get("top_states")
    if top is None:
        raise ValueError("missing column 'top_states' in JSON input")
    labels = [t[0] for t in top]
    freqs = [float(t[1]) for t in top]
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.bar(range(len(labels)), freqs, color="tab:purple")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=60, fontsize=7, family="monospace")
    n = doc.get("record", {}).get("n")
    if n:
        ax.axhline(1.0 / 2**n, color="gray", lw=0.8, ls="--", label="uniform 1/N")
        ax.legend(loc="best")
    ax.set_xlabel("bitstring")
    ax.set_ylabel("sampled frequency")
    ax.set_title(title or "Most frequent output states")
    fig.tight_layout()
    return fig


def _pt_overlay(doc: dict, title: str | None):
    hist = doc.get("pt_histogram")
    if not hist:
        raise ValueError("missing column 'pt_histogram' in JSON input")
    edges = np.asarray(hist["edges"], dtype=float)
    density = np.asarray(hist["density"], dtype=float)
    centers = (edges[:-1] + edges[1:]) / 2.0
    widths = np.diff(edges)
    # Bin-averaged exponential reference; pointwise curve drawn separately.
    theory = (np.exp(-edges[:-1]) - np.exp(-edges[1:])) / widths
    deviations = np.abs(density - theory)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(centers, density, "o", ms=4, color="tab:red", label="measured")
    grid = np.linspace(edges[0], edges[-1], 400)
    ax.plot(grid, np.exp(-grid), "-", color="black", lw=1.2, label="exponential e^{-u}")
    ax.axvline(1.0, color="tab:blue", lw=1.0, ls="--", label="uniform (u = 1)")
    ax.set_yscale("log")
    ax.set_ylim(bottom=max(1e-6, density[density > 0].min() / 10) if density.any() else 1e-6)
    ax.set_xlabel("u = N p")
    ax.set_ylabel("probability density")
    ax.set_title(title or "Output probabilities vs exponential reference")
    ax.legend(loc="best")
    fig.tight_layout()

    lines = [f"max_binwise_deviation {float(deviations.max())!r}"]
    lines += [
        f"{float(edges[i])!r} {float(edges[i + 1])!r} "
        f"{float(density[i])!r} {float(theory[i])!r} {float(deviations[i])!r}"
        for i in range(len(density))
    ]
    return fig, "\n".join(lines) + "\n"


def render_sweep(csv_path, json_paths, out_dir) -> list[str]:
    """Report path for sweeps: CSV figures plus per-run overlays."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    written += render(FigureSpec("xeb_vs_n", str(out / "xeb_vs_n.png"), csv_path=str(csv_path)))
    written += render(FigureSpec("time_vs_m", str(out / "time_vs_m.png"), csv_path=str(csv_path)))
    for jp in json_paths:
        stem = Path(jp).stem
        doc = json.loads(Path(jp).read_text())
        if doc.get("top_states"):
            written += render(
                FigureSpec("top_states", str(out / f"{stem}.top_states.png"), json_path=str(jp))
            )
        if doc.get("pt_histogram"):
            written += render(
                FigureSpec("pt_overlay", str(out / f"{stem}.pt_overlay.png"), json_path=str(jp))
            )
    return written
