/** Render one plot job from harness output files to an SVG image. */

import { parseArgs } from "node:util";
import { writeFileSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { render, type PlotJob } from "./render.js";

const USAGE = `usage: render --kind <kde1d|kde2d_marginal|trajectory|moments_vs_d>
              [--samples samples.csv] [--trajectories trajectories.csv]
              [--sweep sweep.csv] [--mixture mixture.json]
              --out figure.svg [--width 720] [--height 480]`;

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        samples: { type: "string" },
        trajectories: { type: "string" },
        sweep: { type: "string" },
        mixture: { type: "string" },
        out: { type: "string" },
        width: { type: "string", default: "720" },
        height: { type: "string", default: "480" },
        help: { type: "boolean", default: false },
      },
    }).values;
  } catch (err) {
    console.error(String(err));
    console.error(USAGE);
    return 2;
  }
  if (args.help) {
    console.log(USAGE);
    return 0;
  }
  if (!args.kind || !args.out) {
    console.error(USAGE);
    return 2;
  }
  const job: PlotJob = {
    kind: args.kind as PlotJob["kind"],
    samples: args.samples,
    trajectories: args.trajectories,
    sweep: args.sweep,
    mixture: args.mixture,
    width: Number(args.width),
    height: Number(args.height),
  };
  try {
    const out = render(job);
    writeFileSync(args.out, out.svg);
    for (const line of out.summary) console.log(line);
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const entry = process.argv[1];
if (entry && import.meta.url === pathToFileURL(entry).href) {
  process.exitCode = main(process.argv.slice(2));
}
