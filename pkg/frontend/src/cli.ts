#!/usr/bin/env node
// Batch figure renderer for the half-parity simulator's CSV outputs.
//
//   render --kind <postselected|sigma-map|rate-grid> --in <csv...> --out <img>
//
// Exit codes: 0 ok, 1 usage error, 2 input data does not match the
// published schemas, 3 the output file cannot be written.

import { pathToFileURL } from "node:url";
import { DataError, SchemaError } from "./csv.js";
import { FIGURE_KINDS, render, UsageError, type FigureKind } from "./render.js";

const USAGE =
  "usage: render --kind <postselected|sigma-map|rate-grid> --in <csv...> --out <img>";

type Parsed = {
  kind: FigureKind;
  inputs: string[];
  output: string;
};

function parseArgs(argv: string[]): Parsed {
  if (argv[0] !== "render") {
    throw new UsageError(argv.length === 0 ? USAGE : `unknown command: ${argv[0]}\n${USAGE}`);
  }
  let kind: string | null = null;
  let output: string | null = null;
  const inputs: string[] = [];
  let i = 1;
  while (i < argv.length) {
    const flag = argv[i];
    if (flag === "--kind" || flag === "--out") {
      if (i + 1 >= argv.length) {
        throw new UsageError(`${flag} needs a value\n${USAGE}`);
      }
      if (flag === "--kind") {
        kind = argv[i + 1];
      } else {
        output = argv[i + 1];
      }
      i += 2;
    } else if (flag === "--in") {
      i += 1;
      const start = i;
      while (i < argv.length && !argv[i].startsWith("--")) {
        inputs.push(argv[i]);
        i += 1;
      }
      if (i === start) {
        throw new UsageError(`--in needs at least one path\n${USAGE}`);
      }
    } else {
      throw new UsageError(`unknown argument: ${flag}\n${USAGE}`);
    }
  }
  if (kind === null || output === null || inputs.length === 0) {
    throw new UsageError(`--kind, --in and --out are all required\n${USAGE}`);
  }
  if (!(FIGURE_KINDS as string[]).includes(kind)) {
    throw new UsageError(`unknown figure kind: ${kind}\n${USAGE}`);
  }
  return { kind: kind as FigureKind, inputs, output };
}

export function main(argv: string[]): number {
  let parsed: Parsed;
  try {
    parsed = parseArgs(argv);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  try {
    render({ kind: parsed.kind, inputs: parsed.inputs, output: parsed.output });
  } catch (err) {
    if (err instanceof UsageError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof SchemaError || err instanceof DataError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    console.error(`error: cannot write ${parsed.output}: ${(err as Error).message}`);
    return 3;
  }
  console.log(`wrote ${parsed.output}`);
  return 0;
}

if (
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(main(process.argv.slice(2)));
}
