/** Readers for the scenario runner's artifact formats. */

import { readFileSync } from "node:fs";

export class ArtifactError extends Error {
  constructor(public readonly file: string, message: string) {
    super(`${file}: ${message}`);
  }
}

export function readTable(path: string, expectedHeader: string[]): number[][] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new ArtifactError(path, "cannot read input file");
  }
  const lines = text.trim().split("\n");
  if (lines.length === 0 || lines[0].trim() === "") {
    throw new ArtifactError(path, "empty artifact");
  }
  const header = lines[0].split(",").map((s) => s.trim());
  if (header.join(",") !== expectedHeader.join(",")) {
    throw new ArtifactError(
      path,
      `unexpected header "${lines[0]}" (wanted "${expectedHeader.join(",")}")`,
    );
  }
  if (lines.length === 1) {
    throw new ArtifactError(path, "no data rows");
  }
  return lines.slice(1).map((line, idx) => {
    const cells = line.split(",");
    if (cells.length !== expectedHeader.length) {
      throw new ArtifactError(path, `row ${idx + 2}: expected ${expectedHeader.length} cells`);
    }
    return cells.map((c) => {
      if (c === "true") return 1;
      if (c === "false") return 0;
      const v = Number(c);
      if (!Number.isFinite(v)) {
        throw new ArtifactError(path, `row ${idx + 2}: non-numeric cell "${c}"`);
      }
      return v;
    });
  });
}

export interface TrajectoryData {
  times: number[];
  /** opinions[agent][step] */
  opinions: number[][];
}

export function readTrajectories(path: string): TrajectoryData {
  const rows = readTable(path, [
    "step", "time", "agent", "opinion", "control", "brownian", "step_cost",
  ]);
  const nAgents = Math.max(...rows.map((r) => r[2])) + 1;
  const nSteps = Math.max(...rows.map((r) => r[0])) + 1;
  const times = new Array<number>(nSteps).fill(NaN);
  const opinions = Array.from({ length: nAgents }, () => new Array<number>(nSteps).fill(NaN));
  for (const [step, time, agent, opinion] of rows) {
    times[step] = time;
    opinions[agent][step] = opinion;
  }
  if (times.some((t) => Number.isNaN(t)) || opinions.some((o) => o.some(Number.isNaN))) {
    throw new ArtifactError(path, "trajectory grid has holes");
  }
  return { times, opinions };
}

export interface DensityData {
  time: number;
  grid: number[];
  density: number[];
}

export function readDensity(path: string): DensityData {
  const rows = readTable(path, ["time", "grid_x", "density"]);
  return {
    time: rows[0][0],
    grid: rows.map((r) => r[1]),
    density: rows.map((r) => r[2]),
  };
}

export interface SensitivityData {
  param: string;
  values: number[];
  uStar: number[];
  closed: number[];
  fd: number[];
  signOk: boolean[];
}

export function readSensitivity(path: string): SensitivityData {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new ArtifactError(path, "cannot read input file");
  }
  const lines = text.trim().split("\n");
  const expected = "param,value,u_star,sens_closed,sens_fd,sign_ok";
  if (lines[0] !== expected) {
    throw new ArtifactError(path, `unexpected header "${lines[0]}"`);
  }
  if (lines.length === 1) {
    throw new ArtifactError(path, "no data rows");
  }
  const out: SensitivityData = { param: "", values: [], uStar: [], closed: [], fd: [], signOk: [] };
  for (const line of lines.slice(1)) {
    const [param, value, u, closed, fd, ok] = line.split(",");
    out.param = param;
    out.values.push(Number(value));
    out.uStar.push(Number(u));
    out.closed.push(Number(closed));
    out.fd.push(Number(fd));
    out.signOk.push(ok === "true");
  }
  return out;
}
