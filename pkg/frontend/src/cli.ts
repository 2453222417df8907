#!/usr/bin/env node
/**
 * Render rcslab harness outputs as SVG figures.
 *
 *   rcslab-figures --kind xeb_vs_n   --csv sweep.csv  -o xeb.svg
 *   rcslab-figures --kind pt_overlay --json run.json  -o pt.svg
 *   rcslab-figures --all --csv sweep.csv --json run.json -o figures/
 *
 * pt_overlay also writes `<out>.deviations.txt` with the max binwise
 * deviation from the exponential reference on its first line.
 */

import * as fs from "fs";
import * as path from "path";

import { FIGURE_KINDS, FigureKind, RunDocument, render } from "./figures";

interface Args {
  kind?: string;
  csv?: string;
  json?: string;
  out?: string;
  all: boolean;
}

function parseArgs(argv: string[]): Args {
  const args: Args = { all: false };
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new Error(`${a} needs a value`);
      return argv[++i];
    };
    if (a === "--kind") args.kind = next();
    else if (a === "--csv") args.csv = next();
    else if (a === "--json") args.json = next();
    else if (a === "-o" || a === "--out") args.out = next();
    else if (a === "--all") args.all = true;
    else if (a === "--help" || a === "-h") {
      printUsage();
      process.exit(0);
    } else throw new Error(`unknown argument ${a}`);
  }
  return args;
}

function printUsage(): void {
  process.stdout.write(
    "usage: rcslab-figures --kind KIND (--csv PATH | --json PATH) -o OUT.svg\n" +
      "       rcslab-figures --all --csv PATH [--json PATH] -o OUT_DIR\n" +
      `kinds: ${FIGURE_KINDS.join(", ")}\n`
  );
}

function loadDoc(jsonPath: string): RunDocument {
  return JSON.parse(fs.readFileSync(jsonPath, "utf8")) as RunDocument;
}

function writeResult(kind: FigureKind, args: Args, outPath: string): string[] {
  const input: { csvText?: string; doc?: RunDocument } = {};
  if (kind === "xeb_vs_n" || kind === "time_vs_m") {
    if (!args.csv) throw new Error(`${kind} needs --csv`);
    input.csvText = fs.readFileSync(args.csv, "utf8");
  } else {
    if (!args.json) throw new Error(`${kind} needs --json`);
    input.doc = loadDoc(args.json);
  }
  const result = render(kind, input);
  fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
  fs.writeFileSync(outPath, result.svg);
  const written = [outPath];
  if (result.sidecar !== undefined) {
    const sidecar = `${outPath}.deviations.txt`;
    fs.writeFileSync(sidecar, result.sidecar);
    written.push(sidecar);
  }
  return written;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
    if (args.all) {
      if (!args.out) throw new Error("--all needs -o OUT_DIR");
      const written: string[] = [];
      if (args.csv) {
        written.push(...writeResult("xeb_vs_n", args, path.join(args.out, "xeb_vs_n.svg")));
        written.push(...writeResult("time_vs_m", args, path.join(args.out, "time_vs_m.svg")));
      }
      if (args.json) {
        written.push(...writeResult("top_states", args, path.join(args.out, "top_states.svg")));
        written.push(...writeResult("pt_overlay", args, path.join(args.out, "pt_overlay.svg")));
      }
      if (written.length === 0) throw new Error("--all needs --csv and/or --json");
      for (const w of written) process.stdout.write(w + "\n");
      return 0;
    }
    if (!args.kind || !(FIGURE_KINDS as readonly string[]).includes(args.kind)) {
      throw new Error(`--kind must be one of: ${FIGURE_KINDS.join(", ")}`);
    }
    if (!args.out) throw new Error("missing -o OUT");
    for (const w of writeResult(args.kind as FigureKind, args, args.out)) {
      process.stdout.write(w + "\n");
    }
    return 0;
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
