import { interpolateViridis } from "d3-scale-chromatic";
import type { Table } from "../csv.js";
import { rateGrid, sustainedCrossings, tauLabel, type RateGrid } from "../grid.js";
import {
  colorBar, el, frame, makePanel, num, panelTitle, svgDocument,
  xAxis, yAxis, type Panel,
} from "../svg.js";
import { densityCells } from "./sigmaMap.js";

export const CROSSING_LEVEL = 0.5;

const SUCCESS_DOMAIN: [number, number] = [0, 1];

export type RateGridAxes = {
  x: [number, number];
  y: [number, number];
};

export const RATE_GRID_AXES: RateGridAxes = {
  x: [0, 10],
  y: [0, 10],
};

function crossMarker(x: number, y: number, r: number): string {
  return (
    `M${num(x - r)} ${num(y - r)}L${num(x + r)} ${num(y + r)}` +
    `M${num(x - r)} ${num(y + r)}L${num(x + r)} ${num(y - r)}`
  );
}

function panelBody(panel: Panel, grid: RateGrid, index: number): string {
  const product = { x: grid.tI, y: grid.deltaT, values: grid.success };
  const parts: string[] = [];
  parts.push(
    `<clipPath id="plotclip${index}">` +
      el("rect", {
        x: panel.x, y: panel.y, width: panel.width, height: panel.height,
      }) +
      "</clipPath>",
  );
  let clipped = densityCells(panel, product, SUCCESS_DOMAIN, interpolateViridis);
  // White crosses on every window length whose success rate stays at or
  // above one half from some initiation time onward, at the earliest such.
  const marks: string[] = [];
  for (const c of sustainedCrossings(grid, CROSSING_LEVEL)) {
    marks.push(el("path", {
      d: crossMarker(panel.xScale(c.tI), panel.yScale(c.deltaT), 3.2),
      stroke: "#fff", "stroke-width": 1.6, fill: "none", class: "crossing",
    }));
  }
  clipped += el("g", { class: "crossings" }, marks.join(""));
  parts.push(el("g", { "clip-path": `url(#plotclip${index})` }, clipped));
  parts.push(frame(panel));
  parts.push(panelTitle(
    panel, `${tauLabel(grid)}, η = ${num(grid.eta)}`,
  ));
  return parts.join("");
}

/** One success-rate density panel per input grid, crossings marked. */
export function renderRateGrid(
  tables: Table[],
  axes: RateGridAxes = RATE_GRID_AXES,
): string {
  const grids = tables.map(rateGrid);
  const panelW = 250;
  const panelH = 250;
  const perRow = Math.min(grids.length, 3);
  const rows = Math.ceil(grids.length / 3);
  const parts: string[] = [];
  for (let k = 0; k < grids.length; k++) {
    const col = k % 3;
    const row = Math.floor(k / 3);
    const panel = makePanel(
      56 + col * (panelW + 42),
      28 + row * (panelH + 66),
      panelW, panelH, axes.x, axes.y,
    );
    parts.push(panelBody(panel, grids[k], k));
    parts.push(xAxis(panel, "initiation time t_i", 5));
    if (col === 0) {
      parts.push(yAxis(panel, "window length Δt", 5));
    }
  }
  const barX = 56 + perRow * (panelW + 42) - 42 + 14;
  parts.push(colorBar(
    barX, 28, panelH, SUCCESS_DOMAIN, interpolateViridis, "success rate",
  ));
  const height = 28 + (rows - 1) * (panelH + 66) + panelH + 44;
  return svgDocument(barX + 96, height, parts.join(""));
}
