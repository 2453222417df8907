/**
 * Tiny deterministic SVG scene builder: fixed canvas, linear/log scales,
 * axis ticks, and a handful of mark types. No randomness, no timestamps,
 * so identical inputs always produce identical bytes.
 */

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const span = hi - lo || 1;
  const [r0, r1] = range;
  const fn = ((v: number) => r0 + ((Math.log10(v) - lo) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  return fn;
}

export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step;
  const mult = err >= 7.5 ? 10 : err >= 3 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const out: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12; v += s) {
    out.push(Math.abs(v) < s * 1e-9 ? 0 : v);
  }
  return out;
}

export function logTicks(domain: [number, number]): number[] {
  const out: number[] = [];
  const lo = Math.floor(Math.log10(domain[0]));
  const hi = Math.ceil(Math.log10(domain[1]));
  for (let e = lo; e <= hi; e++) {
    const v = Math.pow(10, e);
    if (v >= domain[0] / 1.0001 && v <= domain[1] * 1.0001) out.push(v);
  }
  return out;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmt(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 0.01 && abs < 10000) {
    return Number(v.toPrecision(6)).toString();
  }
  return v.toExponential(2);
}

export class Scene {
  private parts: string[] = [];

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, opts = ""): void {
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" stroke="${stroke}" ${opts}/>`
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5): void {
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(Math.max(w, 0))}" height="${fmt(Math.max(h, 0))}" fill="${fill}"/>`
    );
  }

  text(x: number, y: number, content: string, opts = ""): void {
    this.parts.push(`<text x="${fmt(x)}" y="${fmt(y)}" ${opts}>${esc(content)}</text>`);
  }

  render(title: string): string {
    const header =
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif" font-size="12">`;
    const bg = `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="white"/>`;
    const titleEl = `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${esc(title)}</text>`;
    return [header, bg, titleEl, ...this.parts, "</svg>"].join("\n") + "\n";
  }
}

export interface AxisOptions {
  xLabel: string;
  yLabel: string;
  yLog?: boolean;
}

export function drawAxes(scene: Scene, xs: Scale, ys: Scale, opts: AxisOptions): void {
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  scene.line(x0, y0, x1, y0, "black");
  scene.line(x0, y0, x0, y1, "black");
  for (const t of ticks(xs.domain)) {
    const px = xs(t);
    scene.line(px, y0, px, y0 + 5, "black");
    scene.text(px, y0 + 18, fmt(t), 'text-anchor="middle"');
  }
  const yTicks = opts.yLog ? logTicks(ys.domain) : ticks(ys.domain);
  for (const t of yTicks) {
    const py = ys(t);
    scene.line(x0 - 5, py, x0, py, "black");
    scene.text(x0 - 8, py + 4, fmt(t), 'text-anchor="end"');
  }
  scene.text((x0 + x1) / 2, HEIGHT - 12, opts.xLabel, 'text-anchor="middle"');
  scene.text(
    16,
    (y0 + y1) / 2,
    opts.yLabel,
    `text-anchor="middle" transform="rotate(-90 16 ${(y0 + y1) / 2})"`
  );
}
