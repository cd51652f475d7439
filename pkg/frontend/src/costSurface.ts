/** The quadratic running-cost surface over a pair of opinions.
 *
 * cost(xi, xj) = 0.5 * (w * (xi - xj)^2 + k * (xi - x0)^2 + u^2)
 *
 * Recomputed locally from (k, w, u, x0): the integrand is closed-form, so
 * contour panels need no simulator export.
 */

export interface PanelSpec {
  k: number;
  w: number;
}

export interface SurfaceOptions {
  u: number;
  x0: number;
  grid: number;
  lo: number;
  hi: number;
}

export const SURFACE_DEFAULTS: SurfaceOptions = { u: 0.5, x0: 0.5, grid: 48, lo: 0, hi: 1 };

export function costValue(xi: number, xj: number, k: number, w: number, u: number, x0: number): number {
  return 0.5 * (w * (xi - xj) ** 2 + k * (xi - x0) ** 2 + u * u);
}

export interface Surface {
  /** z[row][col] with row indexing xj and col indexing xi */
  z: number[][];
  xs: number[];
  min: number;
  max: number;
}

export function costSurface(panel: PanelSpec, opts: SurfaceOptions): Surface {
  const { u, x0, grid, lo, hi } = opts;
  const xs = Array.from({ length: grid }, (_, i) => lo + ((hi - lo) * i) / (grid - 1));
  const z = xs.map((xj) => xs.map((xi) => costValue(xi, xj, panel.k, panel.w, u, x0)));
  let min = Infinity;
  let max = -Infinity;
  for (const row of z) {
    for (const v of row) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  }
  return { z, xs, min, max };
}

export type Segment = [number, number, number, number];

/** Marching-squares iso-line segments for one contour level (grid coords). */
export function isoSegments(surface: Surface, level: number): Segment[] {
  const { z, xs } = surface;
  const segs: Segment[] = [];
  const lerp = (a: number, b: number, va: number, vb: number): number =>
    vb === va ? (a + b) / 2 : a + ((level - va) / (vb - va)) * (b - a);
  for (let r = 0; r < z.length - 1; r++) {
    for (let c = 0; c < z[r].length - 1; c++) {
      const v00 = z[r][c];
      const v01 = z[r][c + 1];
      const v10 = z[r + 1][c];
      const v11 = z[r + 1][c + 1];
      const x0c = xs[c];
      const x1c = xs[c + 1];
      const y0c = xs[r];
      const y1c = xs[r + 1];
      const pts: Array<[number, number]> = [];
      if (v00 >= level !== v01 >= level) pts.push([lerp(x0c, x1c, v00, v01), y0c]);
      if (v10 >= level !== v11 >= level) pts.push([lerp(x0c, x1c, v10, v11), y1c]);
      if (v00 >= level !== v10 >= level) pts.push([x0c, lerp(y0c, y1c, v00, v10)]);
      if (v01 >= level !== v11 >= level) pts.push([x1c, lerp(y0c, y1c, v01, v11)]);
      if (pts.length === 2) {
        segs.push([pts[0][0], pts[0][1], pts[1][0], pts[1][1]]);
      } else if (pts.length === 4) {
        // saddle: pair crossing points arbitrarily but consistently
        segs.push([pts[0][0], pts[0][1], pts[2][0], pts[2][1]]);
        segs.push([pts[1][0], pts[1][1], pts[3][0], pts[3][1]]);
      }
    }
  }
  return segs;
}
