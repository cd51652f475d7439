/** The four figure builders: each consumes runner artifacts, emits SVG text. */

import { ArtifactError, readDensity, readSensitivity, readTrajectories } from "./csv.js";
import {
  PanelSpec,
  SURFACE_DEFAULTS,
  SurfaceOptions,
  costSurface,
  isoSegments,
} from "./costSurface.js";
import { Box, Scale, Svg, extent, heatColor, seriesColor } from "./svg.js";

export interface FigureSpec {
  kind: "trajectories" | "densities" | "cost-contours" | "sensitivity";
  inputs: string[];
  output: string;
  style?: {
    width?: number;
    height?: number;
    title?: string;
    panels?: PanelSpec[];
    u?: number;
    x0?: number;
    grid?: number;
  };
}

const MARGIN = { left: 58, right: 16, top: 34, bottom: 44 };

function plotBox(width: number, height: number): Box {
  return {
    x: MARGIN.left,
    y: MARGIN.top,
    width: width - MARGIN.left - MARGIN.right,
    height: height - MARGIN.top - MARGIN.bottom,
  };
}

export function renderTrajectories(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new ArtifactError(spec.inputs.join(","), "trajectories figure wants one CSV");
  }
  const data = readTrajectories(spec.inputs[0]);
  const width = spec.style?.width ?? 860;
  const height = spec.style?.height ?? 480;
  const svg = new Svg(width, height);
  const box = plotBox(width, height);
  const [tLo, tHi] = extent(data.times);
  const all = data.opinions.flat();
  const [yLo, yHi] = extent(all, 0.05);
  const xs = new Scale(tLo, tHi, box.x, box.x + box.width);
  const ys = new Scale(yLo, yHi, box.y + box.height, box.y);
  svg.axes(box, xs, ys, "time", "opinion");
  data.opinions.forEach((path, agent) => {
    svg.polyline(
      path.map((v, k) => [xs.map(data.times[k]), ys.map(v)] as [number, number]),
      seriesColor(agent),
      1,
      0.75,
    );
  });
  svg.text(box.x, 20, spec.style?.title ?? `opinion trajectories (${data.opinions.length} agents)`, 13);
  return svg.toString();
}

export function renderDensities(spec: FigureSpec): string {
  if (spec.inputs.length === 0) {
    throw new ArtifactError("(none)", "densities figure wants at least one snapshot CSV");
  }
  const snaps = spec.inputs.map(readDensity).sort((a, b) => a.time - b.time);
  const width = spec.style?.width ?? 860;
  const height = spec.style?.height ?? 480;
  const svg = new Svg(width, height);
  const box = plotBox(width, height);
  const [xLo, xHi] = extent(snaps.flatMap((s) => s.grid));
  const [, dHi] = extent(snaps.flatMap((s) => s.density));
  const xs = new Scale(xLo, xHi, box.x, box.x + box.width);
  const ys = new Scale(0, dHi * 1.05, box.y + box.height, box.y);
  svg.axes(box, xs, ys, "opinion", "density");
  snaps.forEach((snap, i) => {
    svg.polyline(
      snap.grid.map((g, j) => [xs.map(g), ys.map(snap.density[j])] as [number, number]),
      seriesColor(i),
      1.6,
    );
    svg.text(box.x + box.width - 8, box.y + 14 + 14 * i, `t = ${snap.time}`, 11, "end",
             seriesColor(i));
  });
  svg.text(box.x, 20, spec.style?.title ?? "opinion density snapshots", 13);
  return svg.toString();
}

export function renderCostContours(spec: FigureSpec): string {
  const panels = spec.style?.panels ?? [
    { k: 0.0, w: 1.0 },
    { k: 1.0, w: 1.0 },
    { k: 4.0, w: 1.0 },
    { k: 1.0, w: 4.0 },
  ];
  const opts: SurfaceOptions = {
    ...SURFACE_DEFAULTS,
    u: spec.style?.u ?? SURFACE_DEFAULTS.u,
    x0: spec.style?.x0 ?? SURFACE_DEFAULTS.x0,
    grid: spec.style?.grid ?? SURFACE_DEFAULTS.grid,
  };
  const cell = 210;
  const pad = 52;
  const cols = Math.min(panels.length, 4);
  const rowsN = Math.ceil(panels.length / cols);
  const width = cols * (cell + pad) + 30;
  const height = rowsN * (cell + pad) + 40;
  const svg = new Svg(width, height);
  svg.text(16, 20, spec.style?.title ??
    `running-cost surface, u = ${opts.u}, anchor x0 = ${opts.x0}`, 13);
  panels.forEach((panel, idx) => {
    const col = idx % cols;
    const row = Math.floor(idx / cols);
    const ox = 40 + col * (cell + pad);
    const oy = 42 + row * (cell + pad);
    const surface = costSurface(panel, opts);
    const n = surface.xs.length;
    const span = surface.max - surface.min;
    const px = cell / n;
    for (let r = 0; r < n; r++) {
      for (let c = 0; c < n; c++) {
        const t = span === 0 ? 0.5 : (surface.z[r][c] - surface.min) / span;
        // row r = xj increases upward: flip vertically
        svg.rect(ox + c * px, oy + cell - (r + 1) * px, px + 0.3, px + 0.3, heatColor(t));
      }
    }
    if (span > 0) {
      const sx = new Scale(surface.xs[0], surface.xs[n - 1], ox, ox + cell);
      const sy = new Scale(surface.xs[0], surface.xs[n - 1], oy + cell, oy);
      for (let li = 1; li <= 5; li++) {
        const level = surface.min + (span * li) / 6;
        for (const [x1, y1, x2, y2] of isoSegments(surface, level)) {
          svg.line(sx.map(x1), sy.map(y1), sx.map(x2), sy.map(y2), "#55555f", 0.7);
        }
      }
    }
    svg.rect(ox, oy, cell, cell, "none");
    svg.raw(`<rect x="${ox}" y="${oy}" width="${cell}" height="${cell}" fill="none" stroke="#444"/>`);
    svg.text(ox + cell / 2, oy + cell + 16,
             `k = ${panel.k}, w = ${panel.w}  (cost ${surface.min.toFixed(3)}..${surface.max.toFixed(3)})`,
             10, "middle");
    svg.text(ox + cell / 2, oy + cell + 30, "x_i", 10, "middle");
    svg.text(ox - 10, oy + cell / 2, "x_j", 10, "middle");
  });
  return svg.toString();
}

export function renderSensitivity(spec: FigureSpec): string {
  if (spec.inputs.length !== 1) {
    throw new ArtifactError(spec.inputs.join(","), "sensitivity figure wants one CSV");
  }
  const data = readSensitivity(spec.inputs[0]);
  const width = spec.style?.width ?? 860;
  const height = spec.style?.height ?? 480;
  const svg = new Svg(width, height);
  const box = plotBox(width, height);
  const [xLo, xHi] = extent(data.values, 0.04);
  const [yLo, yHi] = extent([...data.closed, ...data.fd, 0], 0.1);
  const xs = new Scale(xLo, xHi, box.x, box.x + box.width);
  const ys = new Scale(yLo, yHi, box.y + box.height, box.y);
  // sign-agreement shading behind the curves, one band per grid point
  data.values.forEach((v, i) => {
    const lo = i === 0 ? xs.map(v) : xs.map((data.values[i - 1] + v) / 2);
    const hi = i === data.values.length - 1 ? xs.map(v) : xs.map((data.values[i + 1] + v) / 2);
    svg.rect(lo, box.y, Math.max(hi - lo, 1), box.height,
             data.signOk[i] ? "#3fae6a" : "#d0453e", 0.12);
  });
  svg.axes(box, xs, ys, data.param, "d(control)/d(opinion)");
  svg.line(box.x, ys.map(0), box.x + box.width, ys.map(0), "#999", 0.8);
  svg.polyline(data.values.map((v, i) => [xs.map(v), ys.map(data.closed[i])]),
               seriesColor(0), 1.8);
  data.values.forEach((v, i) => svg.circle(xs.map(v), ys.map(data.fd[i]), 3, seriesColor(1)));
  svg.text(box.x + box.width - 8, box.y + 14, "closed form (line) vs finite difference (dots)",
           11, "end");
  svg.text(box.x, 20, spec.style?.title ?? "feedback-control sensitivity", 13);
  return svg.toString();
}

export function renderFigure(spec: FigureSpec): string {
  switch (spec.kind) {
    case "trajectories":
      return renderTrajectories(spec);
    case "densities":
      return renderDensities(spec);
    case "cost-contours":
      return renderCostContours(spec);
    case "sensitivity":
      return renderSensitivity(spec);
    default:
      throw new ArtifactError("(spec)", `unknown figure kind "${(spec as FigureSpec).kind}"`);
  }
}
