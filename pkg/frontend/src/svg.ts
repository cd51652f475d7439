/** Minimal SVG scene builder: axes, polylines, rects, labels. */

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export class Scale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  map(v: number): number {
    const span = this.d1 - this.d0;
    const t = span === 0 ? 0.5 : (v - this.d0) / span;
    return this.r0 + t * (this.r1 - this.r0);
  }
}

export function extent(values: number[], pad = 0.0): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

const fmt = (v: number): string => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1000 || a < 0.01) return v.toExponential(1);
  return Number(v.toPrecision(3)).toString();
};

export function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1): void {
    this.parts.push(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" ` +
        `height="${h.toFixed(2)}" fill="${fill}" fill-opacity="${opacity}"/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1, opacity = 1): void {
    const pts = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
        `stroke-width="${width}" stroke-opacity="${opacity}"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${x1.toFixed(2)}" y1="${y1.toFixed(2)}" x2="${x2.toFixed(2)}" ` +
        `y2="${y2.toFixed(2)}" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(
      `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="${r}" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, s: string, size = 11, anchor = "start", fill = "#333"): void {
    this.parts.push(
      `<text x="${x.toFixed(2)}" y="${y.toFixed(2)}" font-size="${size}" ` +
        `text-anchor="${anchor}" fill="${fill}">${esc(s)}</text>`,
    );
  }

  axes(box: Box, xs: Scale, ys: Scale, xLabel: string, yLabel: string, ticks = 5): void {
    const bottom = box.y + box.height;
    this.line(box.x, bottom, box.x + box.width, bottom, "#444", 1);
    this.line(box.x, box.y, box.x, bottom, "#444", 1);
    for (let i = 0; i <= ticks; i++) {
      const tx = xs.d0 + ((xs.d1 - xs.d0) * i) / ticks;
      const px = xs.map(tx);
      this.line(px, bottom, px, bottom + 4, "#444", 1);
      this.text(px, bottom + 16, fmt(tx), 10, "middle");
      const ty = ys.d0 + ((ys.d1 - ys.d0) * i) / ticks;
      const py = ys.map(ty);
      this.line(box.x - 4, py, box.x, py, "#444", 1);
      this.text(box.x - 6, py + 3, fmt(ty), 10, "end");
    }
    this.text(box.x + box.width / 2, bottom + 32, xLabel, 11, "middle");
    this.raw(
      `<text x="${(box.x - 34).toFixed(2)}" y="${(box.y + box.height / 2).toFixed(2)}" ` +
        `font-size="11" text-anchor="middle" fill="#333" ` +
        `transform="rotate(-90 ${(box.x - 34).toFixed(2)} ${(box.y + box.height / 2).toFixed(2)})">` +
        `${esc(yLabel)}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

/** Sequential color ramp (light yellow to deep blue) for heat maps. */
export function heatColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t));
  const r = Math.round(252 - 200 * clamped);
  const g = Math.round(244 - 170 * clamped);
  const b = Math.round(180 + 60 * clamped);
  return `rgb(${r},${g},${b})`;
}

/** Qualitative palette for line series. */
export function seriesColor(i: number): string {
  const palette = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
  ];
  return palette[i % palette.length];
}
