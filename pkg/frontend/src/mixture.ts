/** The mixture JSON file format shared with the sampling service. */

import { readFileSync } from "node:fs";

export interface Mixture {
  dim: number;
  weights: number[];
  means: number[][];
  covariances: number[][][];
}

export function loadMixture(path: string): Mixture {
  const spec = JSON.parse(readFileSync(path, "utf8"));
  for (const key of ["dim", "weights", "means", "covariances"]) {
    if (!(key in spec)) throw new Error(`${path}: mixture JSON missing "${key}"`);
  }
  const gm = spec as Mixture;
  if (gm.weights.length !== gm.means.length || gm.weights.length !== gm.covariances.length) {
    throw new Error(`${path}: weights/means/covariances lengths disagree`);
  }
  return gm;
}

/** Analytic density of a 1D mixture at the given points. */
export function mixtureDensity1d(gm: Mixture, grid: number[]): number[] {
  if (gm.dim !== 1) throw new Error("analytic overlay only supports dim 1");
  return grid.map((x) => {
    let acc = 0;
    for (let i = 0; i < gm.weights.length; i++) {
      const mu = gm.means[i][0];
      const v = gm.covariances[i][0][0];
      acc += (gm.weights[i] * Math.exp((-0.5 * (x - mu) * (x - mu)) / v)) / Math.sqrt(2 * Math.PI * v);
    }
    return acc;
  });
}

/** Index of the nearest component mean (for coloring by destination mode). */
export function nearestMode(gm: Mixture, point: number[]): number {
  let best = 0;
  let bestDist = Infinity;
  for (let i = 0; i < gm.means.length; i++) {
    let d = 0;
    for (let j = 0; j < point.length; j++) {
      const gap = point[j] - gm.means[i][j];
      d += gap * gap;
    }
    if (d < bestDist) {
      bestDist = d;
      best = i;
    }
  }
  return best;
}
