/**
 * The four figure kinds rendered from harness outputs.
 *
 * Statistics are never recomputed here: XEB values, histograms and state
 * frequencies all come straight out of the CSV/JSON files the benchmark
 * harness writes. The one derived quantity is the pt_overlay sidecar,
 * which compares the recorded histogram against the exponential reference
 * curve bin by bin.
 */

import { CsvRow, okRows, parseCsv } from "./csv";
import { MARGIN, HEIGHT, WIDTH, Scene, drawAxes, fmt, linearScale, logScale } from "./svg";

export const FIGURE_KINDS = ["top_states", "pt_overlay", "xeb_vs_n", "time_vs_m"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface RunDocument {
  record: { n?: number; label?: string; [key: string]: unknown };
  top_states?: Array<[string, number]>;
  pt_histogram?: { edges: number[]; density: number[] } | null;
}

export interface RenderResult {
  svg: string;
  /** Sidecar text for pt_overlay; undefined for the other kinds. */
  sidecar?: string;
}

const plotArea = {
  x: [MARGIN.left, WIDTH - MARGIN.right] as [number, number],
  y: [HEIGHT - MARGIN.bottom, MARGIN.top] as [number, number],
};

function num(row: CsvRow, col: string): number {
  const v = Number(row[col]);
  if (!Number.isFinite(v)) {
    throw new Error(`non-numeric value '${row[col]}' in column '${col}'`);
  }
  return v;
}

export function xebVsN(csvText: string, title = "Linear XEB vs circuit width"): RenderResult {
  const rows = okRows(parseCsv(csvText), ["n", "f_xeb", "std_dev"]).filter(
    (r) => r.f_xeb !== ""
  );
  const pts = rows
    .map((r) => ({ n: num(r, "n"), f: num(r, "f_xeb"), sd: num(r, "std_dev") }))
    .sort((a, b) => a.n - b.n);
  const scene = new Scene();
  const nDomain: [number, number] =
    pts.length > 0 ? [Math.min(...pts.map((p) => p.n)) - 1, Math.max(...pts.map((p) => p.n)) + 1] : [0, 1];
  const fVals = pts.flatMap((p) => [p.f - p.sd, p.f + p.sd, 0, 1.05]);
  const fDomain: [number, number] =
    pts.length > 0 ? [Math.min(...fVals) - 0.05, Math.max(...fVals) + 0.05] : [0, 1];
  const xs = linearScale(nDomain, plotArea.x);
  const ys = linearScale(fDomain, plotArea.y);
  drawAxes(scene, xs, ys, { xLabel: "qubits n", yLabel: "linear XEB" });
  scene.line(plotArea.x[0], ys(1), plotArea.x[1], ys(1), "gray", 'stroke-dasharray="4 3"');
  scene.line(plotArea.x[0], ys(0), plotArea.x[1], ys(0), "gray", 'stroke-dasharray="1 3"');
  if (pts.length > 0) {
    scene.polyline(pts.map((p) => [xs(p.n), ys(p.f)]), "#c0392b");
    for (const p of pts) {
      scene.line(xs(p.n), ys(p.f - p.sd), xs(p.n), ys(p.f + p.sd), "#c0392b");
      scene.circle(xs(p.n), ys(p.f), 3.5, "#c0392b");
    }
  }
  return { svg: scene.render(title) };
}

export function timeVsM(csvText: string, title = "Time to first sample vs depth"): RenderResult {
  const rows = okRows(parseCsv(csvText), ["m", "time_to_first_sample_s"]).filter(
    (r) => r.m !== "" && r.time_to_first_sample_s !== ""
  );
  const pts = rows
    .map((r) => ({ m: num(r, "m"), t: num(r, "time_to_first_sample_s") }))
    .sort((a, b) => a.m - b.m);
  const scene = new Scene();
  const mDomain: [number, number] =
    pts.length > 0 ? [Math.min(...pts.map((p) => p.m)) - 1, Math.max(...pts.map((p) => p.m)) + 1] : [0, 1];
  const tMax = pts.length > 0 ? Math.max(...pts.map((p) => p.t)) : 1;
  const xs = linearScale(mDomain, plotArea.x);
  const ys = linearScale([0, tMax * 1.15 || 1], plotArea.y);
  drawAxes(scene, xs, ys, { xLabel: "cycles m", yLabel: "time to first sample [s]" });
  if (pts.length > 0) {
    scene.polyline(pts.map((p) => [xs(p.m), ys(p.t)]), "#2471a3");
    for (const p of pts) scene.circle(xs(p.m), ys(p.t), 3.5, "#2471a3");
  }
  return { svg: scene.render(title) };
}

export function topStates(doc: RunDocument, title = "Most frequent output states"): RenderResult {
  const top = doc.top_states;
  if (!top || top.length === 0) {
    throw new Error("missing 'top_states' in JSON input");
  }
  const scene = new Scene();
  const freqs = top.map(([, f]) => f);
  const xs = linearScale([-0.6, top.length - 0.4], plotArea.x);
  const ys = linearScale([0, Math.max(...freqs) * 1.2], plotArea.y);
  const y0 = plotArea.y[0];
  scene.line(plotArea.x[0], y0, plotArea.x[1], y0, "black");
  scene.line(plotArea.x[0], y0, plotArea.x[0], plotArea.y[1], "black");
  const barWidth = (xs(1) - xs(0)) * 0.8;
  top.forEach(([label, freq], i) => {
    const cx = xs(i);
    scene.rect(cx - barWidth / 2, ys(freq), barWidth, y0 - ys(freq), "#7d3c98");
    scene.text(
      cx,
      y0 + 12,
      label,
      `text-anchor="end" font-size="9" font-family="monospace" transform="rotate(-55 ${fmt(cx)} ${y0 + 12})"`
    );
  });
  const n = doc.record?.n;
  if (typeof n === "number") {
    const uniform = Math.pow(2, -n);
    scene.line(plotArea.x[0], ys(uniform), plotArea.x[1], ys(uniform), "gray", 'stroke-dasharray="4 3"');
  }
  for (const t of [0, Math.max(...freqs)]) {
    scene.text(plotArea.x[0] - 8, ys(t) + 4, fmt(t), 'text-anchor="end"');
  }
  scene.text((plotArea.x[0] + plotArea.x[1]) / 2, HEIGHT - 6, "bitstring", 'text-anchor="middle"');
  scene.text(16, (plotArea.y[0] + plotArea.y[1]) / 2, "sampled frequency",
    `text-anchor="middle" transform="rotate(-90 16 ${(plotArea.y[0] + plotArea.y[1]) / 2})"`);
  return { svg: scene.render(title) };
}

export interface OverlayDeviation {
  lo: number;
  hi: number;
  empirical: number;
  theory: number;
  deviation: number;
}

/** Bin-averaged exponential reference compared against the recorded histogram. */
export function overlayDeviations(edges: number[], density: number[]): OverlayDeviation[] {
  const out: OverlayDeviation[] = [];
  for (let i = 0; i < density.length; i++) {
    const lo = edges[i];
    const hi = edges[i + 1];
    const theory = (Math.exp(-lo) - Math.exp(-hi)) / (hi - lo);
    out.push({ lo, hi, empirical: density[i], theory, deviation: Math.abs(density[i] - theory) });
  }
  return out;
}

export function formatSidecar(deviations: OverlayDeviation[]): string {
  const max = Math.max(...deviations.map((d) => d.deviation));
  const lines = [`max_binwise_deviation ${max}`];
  for (const d of deviations) {
    lines.push(`${d.lo} ${d.hi} ${d.empirical} ${d.theory} ${d.deviation}`);
  }
  return lines.join("\n") + "\n";
}

export function ptOverlay(
  doc: RunDocument,
  title = "Output probabilities vs exponential reference"
): RenderResult {
  const hist = doc.pt_histogram;
  if (!hist) {
    throw new Error("missing 'pt_histogram' in JSON input");
  }
  const { edges, density } = hist;
  const deviations = overlayDeviations(edges, density);
  const scene = new Scene();
  const positive = density.filter((d) => d > 0);
  const floor = positive.length > 0 ? Math.min(...positive) / 10 : 1e-6;
  const yDomain: [number, number] = [Math.max(floor, 1e-7), 1.5];
  const xs = linearScale([edges[0], edges[edges.length - 1]], plotArea.x);
  const ys = logScale(yDomain, plotArea.y);
  drawAxes(scene, xs, ys, { xLabel: "u = N p", yLabel: "probability density", yLog: true });
  // theory curve e^{-u}
  const curve: Array<[number, number]> = [];
  const u0 = edges[0];
  const u1 = edges[edges.length - 1];
  for (let i = 0; i <= 240; i++) {
    const u = u0 + ((u1 - u0) * i) / 240;
    const v = Math.exp(-u);
    if (v >= yDomain[0]) curve.push([xs(u), ys(v)]);
  }
  scene.polyline(curve, "black", 1.2);
  // uniform marker at u = 1
  scene.line(xs(1), plotArea.y[0], xs(1), plotArea.y[1], "#2471a3", 'stroke-dasharray="5 3"');
  // measured points at bin centers
  for (let i = 0; i < density.length; i++) {
    if (density[i] > 0 && density[i] >= yDomain[0]) {
      scene.circle(xs((edges[i] + edges[i + 1]) / 2), ys(density[i]), 3, "#c0392b");
    }
  }
  return { svg: scene.render(title), sidecar: formatSidecar(deviations) };
}

export function render(kind: FigureKind, input: { csvText?: string; doc?: RunDocument }): RenderResult {
  switch (kind) {
    case "xeb_vs_n":
      if (input.csvText === undefined) throw new Error("xeb_vs_n needs CSV input");
      return xebVsN(input.csvText);
    case "time_vs_m":
      if (input.csvText === undefined) throw new Error("time_vs_m needs CSV input");
      return timeVsM(input.csvText);
    case "top_states":
      if (input.doc === undefined) throw new Error("top_states needs JSON input");
      return topStates(input.doc);
    case "pt_overlay":
      if (input.doc === undefined) throw new Error("pt_overlay needs JSON input");
      return ptOverlay(input.doc);
  }
}
