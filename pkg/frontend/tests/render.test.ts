import { existsSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { render } from "../src/render.js";
import { main as cliMain } from "../src/cli.js";
import { TWO_MODE_MIXTURE, twoModeDraws, gaussianDraws } from "./helpers.js";

const dir = mkdtempSync(join(tmpdir(), "plots-render-"));

function writeSamples(name: string, values: number[][]): string {
  const d = values[0].length;
  const header = Array.from({ length: d }, (_, j) => `x${j + 1}`).join(",");
  const body = values.map((r) => r.join(",")).join("\n");
  const path = join(dir, name);
  writeFileSync(path, `${header}\n${body}\n`);
  return path;
}

const mixturePath = join(dir, "mixture.json");
writeFileSync(mixturePath, JSON.stringify(TWO_MODE_MIXTURE));

describe("kde1d rendering", () => {
  const samples = writeSamples("gt.csv", twoModeDraws(10_000, 11).map((v) => [v]));

  it("reports the footer gap below 0.05 on ground-truth draws", () => {
    const out = render({ kind: "kde1d", samples, mixture: mixturePath,
                         width: 720, height: 480 });
    const line = out.summary.find((l) => l.startsWith("max-gap"));
    expect(line).toBeDefined();
    expect(Number(line!.split(" ")[1])).toBeLessThan(0.05);
    expect(out.svg).toContain("max |kde - density|");
    expect(out.svg).toContain("<svg");
  });

  it("is deterministic", () => {
    const job = { kind: "kde1d" as const, samples, mixture: mixturePath,
                  width: 720, height: 480 };
    expect(render(job).svg).toBe(render(job).svg);
  });

  it("rejects multivariate input", () => {
    const s2 = writeSamples("d2.csv", [[0, 1], [1, 0]]);
    expect(() => render({ kind: "kde1d", samples: s2, width: 720, height: 480 }))
      .toThrow(/1D/);
  });
});

describe("kde2d_marginal rendering", () => {
  it("renders scatter plus marginals for 2D samples", () => {
    const z = gaussianDraws(4000, 5);
    const pts = Array.from({ length: 2000 }, (_, i) => [z[2 * i], z[2 * i + 1] + 1]);
    const samples = writeSamples("pts.csv", pts);
    const out = render({ kind: "kde2d_marginal", samples, width: 640, height: 640 });
    expect(out.svg).toContain("circle");
    expect((out.svg.match(/<polyline/g) ?? []).length).toBeGreaterThanOrEqual(2);
  });
});

describe("trajectory rendering", () => {
  it("draws one path per particle, colored by destination mode", () => {
    const rows: string[] = ["particle_id,t,x1,x2"];
    for (let p = 0; p < 3; p++) {
      for (let k = 0; k <= 10; k++) {
        const t = 0.01 + (0.98 * k) / 10;
        rows.push(`${p},${t},${(p - 1) * t * 2},${t}`);
      }
    }
    const path = join(dir, "traj.csv");
    writeFileSync(path, rows.join("\n") + "\n");
    const out = render({ kind: "trajectory", trajectories: path, width: 720, height: 480 });
    expect((out.svg.match(/<polyline/g) ?? []).length).toBe(3);
  });

  it("errors on an empty trajectory file without writing output", () => {
    const path = join(dir, "empty_traj.csv");
    writeFileSync(path, "particle_id,t,x1\n");
    const outPath = join(dir, "should_not_exist.svg");
    const rc = cliMain(["--kind", "trajectory", "--trajectories", path,
                        "--out", outPath]);
    expect(rc).toBe(1);
    expect(existsSync(outPath)).toBe(false);
  });
});

describe("moments_vs_d rendering", () => {
  it("renders four panels from a sweep csv", () => {
    const header = "axis,value,moment_1,moment_2,moment_mgf,moment_cos,"
      + "truth_1,truth_2,truth_mgf,truth_cos";
    const rows = [header];
    for (let d = 1; d <= 10; d++) {
      const m1 = 0.6 * Math.sqrt(d);
      rows.push(`1,${d},${m1 + 0.01},${m1 * m1 + 0.4},${Math.exp(m1) * 1.1},`
        + `${5 * Math.cos(m1) * 0.9},${m1},${m1 * m1 + 0.41},${Math.exp(m1) * 1.12},`
        + `${5 * Math.cos(m1) * 0.88}`);
    }
    const path = join(dir, "sweep.csv");
    writeFileSync(path, rows.join("\n") + "\n");
    const out = render({ kind: "moments_vs_d", sweep: path, width: 900, height: 640 });
    for (const title of ["first moment", "second moment", "exp moment", "5 cos moment"]) {
      expect(out.svg).toContain(title);
    }
  });

  it("names a missing column", () => {
    const path = join(dir, "badsweep.csv");
    writeFileSync(path, "axis,value,moment_1\n1,1,0.5\n");
    expect(() => render({ kind: "moments_vs_d", sweep: path, width: 900, height: 640 }))
      .toThrow(/truth_1|moment_2/);
  });
});

describe("cli", () => {
  it("writes an svg and prints the summary", () => {
    const samples = writeSamples("cli.csv", twoModeDraws(2000, 21).map((v) => [v]));
    const outPath = join(dir, "cli.svg");
    const rc = cliMain(["--kind", "kde1d", "--samples", samples,
                        "--mixture", mixturePath, "--out", outPath]);
    expect(rc).toBe(0);
    expect(existsSync(outPath)).toBe(true);
  });

  it("fails cleanly on unknown kinds", () => {
    const rc = cliMain(["--kind", "sunburst", "--out", join(dir, "x.svg")]);
    expect(rc).toBe(1);
  });
});
