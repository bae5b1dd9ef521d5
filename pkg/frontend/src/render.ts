import { writeFileSync } from "node:fs";
import { readTable } from "./csv.js";
import {
  POSTSELECTED_AXES, renderPostselected, type PostselectedAxes,
} from "./figures/postselected.js";
import {
  renderSigmaMap, SIGMA_MAP_AXES, type SigmaMapAxes,
} from "./figures/sigmaMap.js";
import {
  RATE_GRID_AXES, renderRateGrid, type RateGridAxes,
} from "./figures/rateGrid.js";

export type FigureKind = "postselected" | "sigma-map" | "rate-grid";

export const FIGURE_KINDS: FigureKind[] = [
  "postselected", "sigma-map", "rate-grid",
];

/**
 * One figure request: input CSVs, the figure kind, and the output image
 * path. Axis ranges are fixed constants per kind unless overridden here;
 * they are never derived from the data.
 */
export type FigureSpec = {
  kind: FigureKind;
  inputs: string[];
  output: string;
  axes?: Partial<PostselectedAxes & SigmaMapAxes & RateGridAxes>;
};

/** Raised for a spec the renderer cannot act on (counts, kinds, paths). */
export class UsageError extends Error {}

const INPUT_COUNTS: Record<FigureKind, [number, number]> = {
  postselected: [1, 1],
  "sigma-map": [2, 2],
  "rate-grid": [1, Infinity],
};

const INPUT_HELP: Record<FigureKind, string> = {
  postselected: "the summary CSV",
  "sigma-map": "the heat-fluctuation CSV then the concurrence CSV",
  "rate-grid": "one or more rate-grid CSVs",
};

function buildSvg(spec: FigureSpec): string {
  const [lo, hi] = INPUT_COUNTS[spec.kind];
  if (spec.inputs.length < lo || spec.inputs.length > hi) {
    throw new UsageError(
      `${spec.kind} takes ${INPUT_HELP[spec.kind]}, got ${spec.inputs.length} input(s)`,
    );
  }
  const tables = spec.inputs.map(readTable);
  if (spec.kind === "postselected") {
    return renderPostselected(tables[0], { ...POSTSELECTED_AXES, ...spec.axes });
  }
  if (spec.kind === "sigma-map") {
    return renderSigmaMap(tables[0], tables[1], { ...SIGMA_MAP_AXES, ...spec.axes });
  }
  return renderRateGrid(tables, { ...RATE_GRID_AXES, ...spec.axes });
}

/** Renders the figure and writes it to spec.output; inputs are only read. */
export function render(spec: FigureSpec): void {
  const svg = buildSvg(spec);
  writeFileSync(spec.output, svg);
}
