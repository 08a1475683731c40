/** Plot jobs: each kind reads harness output files and returns an SVG
 * string plus any console summary lines. Inputs are never modified. */

import { readSamples, readTrajectories, readCsv, requireColumns, column } from "./csv.js";
import { bandwidth, kde1d, linspace } from "./kde.js";
import { loadMixture, mixtureDensity1d, nearestMode, type Mixture } from "./mixture.js";
import { PALETTE, Panel, document as svgDocument } from "./svg.js";

export interface PlotJob {
  kind: "kde1d" | "kde2d_marginal" | "trajectory" | "moments_vs_d";
  samples?: string;
  trajectories?: string;
  sweep?: string;
  mixture?: string;
  width: number;
  height: number;
}

export interface Rendered {
  svg: string;
  summary: string[];
}

function extent(values: number[], pad = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

export function renderKde1d(job: PlotJob): Rendered {
  if (!job.samples) throw new Error("kde1d needs --samples");
  const rows = readSamples(job.samples);
  if (rows[0].length !== 1) {
    throw new Error(`kde1d expects 1D samples, got dimension ${rows[0].length}`);
  }
  const xs = rows.map((r) => r[0]);
  const gm = job.mixture ? loadMixture(job.mixture) : null;
  const [lo, hi] = extent(xs, 0.08);
  const grid = linspace(lo, hi, 512);
  const h = bandwidth(xs);
  const est = kde1d(xs, grid, h);
  const summary: string[] = [];
  let footer = `n = ${xs.length}, bandwidth = ${h.toFixed(4)}`;
  let dens: number[] | null = null;
  if (gm) {
    dens = mixtureDensity1d(gm, grid);
    let gap = 0;
    for (let i = 0; i < grid.length; i++) gap = Math.max(gap, Math.abs(est[i] - dens[i]));
    footer += `, max |kde - density| = ${gap.toFixed(4)}`;
    summary.push(`max-gap ${gap.toFixed(6)}`);
  }
  const ymax = Math.max(...est, ...(dens ?? [0]));
  const panel = new Panel({ x: 60, y: 30, width: job.width - 90, height: job.height - 100 },
    [lo, hi], [0, 1.08 * ymax]);
  if (dens) panel.area(grid, dens, "#bbbbbb");
  panel.line(grid, est, "#d62728", 1.8);
  panel.axes("x", "density", "sample KDE vs target density");
  return { svg: svgDocument(job.width, job.height, panel.parts, footer), summary };
}

export function renderKde2dMarginal(job: PlotJob): Rendered {
  if (!job.samples) throw new Error("kde2d_marginal needs --samples");
  const rows = readSamples(job.samples);
  if (rows[0].length !== 2) {
    throw new Error(`kde2d_marginal expects 2D samples, got dimension ${rows[0].length}`);
  }
  const xs = rows.map((r) => r[0]);
  const ys = rows.map((r) => r[1]);
  const xlim = extent(xs);
  const ylim = extent(ys);
  const margin = 60;
  const side = 90;
  const w = job.width - margin - side - 10;
  const hgt = job.height - margin - side - 20;
  const main = new Panel({ x: margin, y: side + 10, width: w, height: hgt }, xlim, ylim);
  const stride = Math.max(1, Math.floor(rows.length / 3000));
  const sx: number[] = [];
  const sy: number[] = [];
  for (let i = 0; i < rows.length; i += stride) {
    sx.push(xs[i]);
    sy.push(ys[i]);
  }
  main.dots(sx, sy, "#1f77b4", 1.5, 0.45);
  main.axes("x1", "x2");

  const gx = linspace(xlim[0], xlim[1], 256);
  const fx = kde1d(xs, gx);
  const top = new Panel({ x: margin, y: 8, width: w, height: side - 8 },
    xlim, [0, 1.08 * Math.max(...fx)]);
  top.line(gx, fx, "#d62728", 1.5);
  top.axes();

  const gy = linspace(ylim[0], ylim[1], 256);
  const fy = kde1d(ys, gy);
  // right marginal drawn with the density on the horizontal axis
  const right = new Panel({ x: margin + w + 6, y: side + 10, width: side - 8, height: hgt },
    [0, 1.08 * Math.max(...fy)], ylim);
  right.line(fy, gy, "#d62728", 1.5);
  right.axes();

  const footer = `n = ${rows.length}, scatter stride = ${stride}`;
  return {
    svg: svgDocument(job.width, job.height, [...top.parts, ...right.parts, ...main.parts], footer),
    summary: [],
  };
}

export function renderTrajectory(job: PlotJob): Rendered {
  if (!job.trajectories) throw new Error("trajectory needs --trajectories");
  const { particles, dim } = readTrajectories(job.trajectories);
  const gm: Mixture | null = job.mixture ? loadMixture(job.mixture) : null;
  const ids = [...particles.keys()].sort((a, b) => a - b);
  const panelBox = { x: 60, y: 30, width: job.width - 90, height: job.height - 90 };
  const parts: string[] = [];
  if (dim >= 2) {
    const allX: number[] = [];
    const allY: number[] = [];
    for (const id of ids) {
      for (const row of particles.get(id)!) {
        allX.push(row[1]);
        allY.push(row[2]);
      }
    }
    const panel = new Panel(panelBox, extent(allX), extent(allY));
    for (const id of ids) {
      const path = particles.get(id)!;
      const final = path[path.length - 1];
      const mode = gm ? nearestMode(gm, final.slice(1)) : id;
      const color = PALETTE[mode % PALETTE.length];
      panel.line(path.map((r) => r[1]), path.map((r) => r[2]), color, 1.0, 0.8);
      panel.dots([final[1]], [final[2]], color, 2.5, 1.0);
    }
    if (gm) {
      panel.dots(gm.means.map((m) => m[0]), gm.means.map((m) => m[1]), "#000", 2.0, 0.9);
    }
    panel.axes("x1", "x2", "flow trajectories, colored by destination mode");
    parts.push(...panel.parts);
  } else {
    const allT: number[] = [];
    const allX: number[] = [];
    for (const id of ids) {
      for (const row of particles.get(id)!) {
        allT.push(row[0]);
        allX.push(row[1]);
      }
    }
    const panel = new Panel(panelBox, extent(allT, 0.02), extent(allX));
    for (const id of ids) {
      const path = particles.get(id)!;
      const final = path[path.length - 1];
      const mode = gm ? nearestMode(gm, final.slice(1)) : id;
      panel.line(path.map((r) => r[0]), path.map((r) => r[1]),
        PALETTE[mode % PALETTE.length], 1.0, 0.85);
    }
    panel.axes("t", "x", "flow trajectories over time");
    parts.push(...panel.parts);
  }
  const footer = `${ids.length} particles, dimension ${dim}`;
  return { svg: svgDocument(job.width, job.height, parts, footer), summary: [] };
}

const MOMENT_PANELS: Array<{ est: string; truth: string; title: string }> = [
  { est: "moment_1", truth: "truth_1", title: "first moment" },
  { est: "moment_2", truth: "truth_2", title: "second moment" },
  { est: "moment_mgf", truth: "truth_mgf", title: "exp moment" },
  { est: "moment_cos", truth: "truth_cos", title: "5 cos moment" },
];

export function renderMomentsVsD(job: PlotJob): Rendered {
  if (!job.sweep) throw new Error("moments_vs_d needs --sweep");
  const table = readCsv(job.sweep);
  requireColumns(
    table,
    ["value", ...MOMENT_PANELS.flatMap((p) => [p.est, p.truth])],
    job.sweep,
  );
  const d = column(table, "value");
  const parts: string[] = [];
  const cols = 2;
  const cellW = (job.width - 140) / cols;
  const cellH = (job.height - 130) / 2;
  MOMENT_PANELS.forEach((spec, i) => {
    const est = column(table, spec.est);
    const truth = column(table, spec.truth);
    const r = Math.floor(i / cols);
    const c = i % cols;
    const panel = new Panel(
      { x: 70 + c * (cellW + 50), y: 40 + r * (cellH + 55), width: cellW, height: cellH },
      extent(d, 0.03), extent([...est, ...truth], 0.15),
    );
    panel.line(d, truth, "#444", 1.2);
    panel.line(d, est, "#d62728", 1.6);
    panel.dots(d, est, "#d62728", 2.2, 1.0);
    panel.axes("d", "", spec.title);
    parts.push(...panel.parts);
  });
  const footer = `${d.length} sweep rows; grey = ground truth, red = estimate`;
  return { svg: svgDocument(job.width, job.height, parts, footer), summary: [] };
}

export function render(job: PlotJob): Rendered {
  switch (job.kind) {
    case "kde1d":
      return renderKde1d(job);
    case "kde2d_marginal":
      return renderKde2dMarginal(job);
    case "trajectory":
      return renderTrajectory(job);
    case "moments_vs_d":
      return renderMomentsVsD(job);
    default:
      throw new Error(`unknown plot kind ${(job as PlotJob).kind}`);
  }
}
