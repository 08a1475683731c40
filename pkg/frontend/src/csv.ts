/** Readers for the harness CSV outputs (samples, trajectories, sweeps). */

import { readFileSync } from "node:fs";

export type Cell = number | string;

export interface Table {
  columns: string[];
  rows: Cell[][];
  path: string;
}

export function parseCsv(text: string, path = "<csv>"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new Error(`${path}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: Cell[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(
        `${path}: row ${i} has ${parts.length} fields, expected ${columns.length}`,
      );
    }
    rows.push(parts.map((p) => {
      const v = Number(p);
      return Number.isFinite(v) && p.trim() !== "" ? v : p.trim();
    }));
  }
  return { columns, rows, path };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf8"), path);
}

export function requireColumns(table: Table, needed: string[], path: string): void {
  for (const name of needed) {
    if (!table.columns.includes(name)) {
      throw new Error(`${path}: missing column "${name}" (have: ${table.columns.join(", ")})`);
    }
  }
}

/** Numeric column accessor; names the offending column on bad cells. */
export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) throw new Error(`${table.path}: missing column "${name}"`);
  return table.rows.map((r, i) => {
    const v = r[idx];
    if (typeof v !== "number") {
      throw new Error(`${table.path}: column "${name}" row ${i + 1} is not a number: ${v}`);
    }
    return v;
  });
}

/** samples.csv: columns x1..xd, one row per sample. */
export function readSamples(path: string): number[][] {
  const table = readCsv(path);
  requireColumns(table, ["x1"], path);
  const odd = table.columns.find((c) => !/^x\d+$/.test(c));
  if (odd !== undefined) {
    throw new Error(`${path}: unexpected column "${odd}" in a samples file`);
  }
  const cols = table.columns.map((c) => column(table, c));
  return table.rows.map((_, i) => cols.map((c) => c[i]));
}

export interface Trajectories {
  /** particle id -> list of [t, x1, ..., xd] rows in time order */
  particles: Map<number, number[][]>;
  dim: number;
}

/** trajectories.csv: particle_id, t, x1..xd. */
export function readTrajectories(path: string): Trajectories {
  const table = readCsv(path);
  requireColumns(table, ["particle_id", "t", "x1"], path);
  if (table.rows.length === 0) {
    throw new Error(`${path}: no trajectory rows`);
  }
  const dim = table.columns.length - 2;
  const pid = column(table, "particle_id");
  const series = table.columns.slice(1).map((c) => column(table, c));
  const particles = new Map<number, number[][]>();
  for (let i = 0; i < table.rows.length; i++) {
    const key = pid[i];
    if (!particles.has(key)) particles.set(key, []);
    particles.get(key)!.push(series.map((s) => s[i]));
  }
  return { particles, dim };
}
