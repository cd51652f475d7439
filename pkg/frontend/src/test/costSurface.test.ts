import assert from "node:assert/strict";
import { test } from "node:test";

import { SURFACE_DEFAULTS, costSurface, costValue, isoSegments } from "../costSurface.js";

test("flat panel: w=0, k=0, u=0.5 is constant at 0.125", () => {
  const surface = costSurface({ k: 0, w: 0 }, { ...SURFACE_DEFAULTS, u: 0.5 });
  for (const row of surface.z) {
    for (const v of row) {
      assert.ok(Math.abs(v - 0.125) <= 1e-12, `expected 0.125, got ${v}`);
    }
  }
  assert.ok(Math.abs(surface.min - 0.125) <= 1e-12);
  assert.ok(Math.abs(surface.max - 0.125) <= 1e-12);
});

test("cost value matches the quadratic by hand", () => {
  // 0.5 * (w(xi-xj)^2 + k(xi-x0)^2 + u^2) at a worked point
  const v = costValue(0.8, 0.3, 2.0, 1.0, 0.4, 0.5);
  assert.ok(Math.abs(v - 0.295) < 1e-15);
});

test("large k elongates level sets along the neighbor axis", () => {
  // with w=0 the cost ignores xj entirely: variation along xi dominates
  const surface = costSurface({ k: 8, w: 0 }, { ...SURFACE_DEFAULTS, u: 0.5 });
  const n = surface.xs.length;
  const mid = Math.floor(n / 2);
  // edge-to-center variation along the own-opinion axis vs none along xj
  const alongXi = Math.abs(surface.z[mid][0] - surface.z[mid][mid]);
  const alongXj = Math.abs(surface.z[0][mid] - surface.z[n - 1][mid]);
  assert.ok(alongXi > 0.5);
  assert.equal(alongXj, 0);
});

test("higher w steepens the neighbor-gap direction", () => {
  const gentle = costSurface({ k: 1, w: 1 }, SURFACE_DEFAULTS);
  const steep = costSurface({ k: 1, w: 6 }, SURFACE_DEFAULTS);
  assert.ok(steep.max > gentle.max);
});

test("iso segments straddle the requested level", () => {
  const surface = costSurface({ k: 2, w: 1 }, SURFACE_DEFAULTS);
  const level = (surface.min + surface.max) / 2;
  const segs = isoSegments(surface, level);
  assert.ok(segs.length > 0);
  for (const [x1, y1, x2, y2] of segs) {
    for (const v of [x1, y1, x2, y2]) {
      assert.ok(v >= surface.xs[0] - 1e-12 && v <= surface.xs.at(-1)! + 1e-12);
    }
  }
});

test("flat surface has no iso segments", () => {
  const surface = costSurface({ k: 0, w: 0 }, { ...SURFACE_DEFAULTS, u: 0.5 });
  assert.equal(isoSegments(surface, 0.2).length, 0);
});
