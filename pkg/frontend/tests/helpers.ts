/** Deterministic synthetic data for tests: seeded PRNG + Box-Muller draws. */

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function gaussianDraws(n: number, seed: number): number[] {
  const rand = mulberry32(seed);
  const out: number[] = [];
  while (out.length < n) {
    const u = Math.max(rand(), 1e-12);
    const v = rand();
    const r = Math.sqrt(-2 * Math.log(u));
    out.push(r * Math.cos(2 * Math.PI * v));
    if (out.length < n) out.push(r * Math.sin(2 * Math.PI * v));
  }
  return out;
}

/** Draws from the two-mode benchmark: w1 N(-2, 0.25) + w2 N(2, 0.25). */
export function twoModeDraws(n: number, seed: number): number[] {
  const rand = mulberry32(seed ^ 0x9e3779b9);
  const z = gaussianDraws(n, seed);
  return z.map((zi) => {
    const mu = rand() < 0.25 ? -2 : 2;
    return mu + 0.5 * zi;
  });
}

export const TWO_MODE_MIXTURE = {
  dim: 1,
  weights: [0.25, 0.75],
  means: [[-2], [2]],
  covariances: [[[0.25]], [[0.25]]],
};
