import { interpolateViridis } from "d3-scale-chromatic";
import { DataError, type Table } from "../csv.js";
import { contourSegments } from "../contour.js";
import { analyticGrid, type ProductGrid } from "../grid.js";
import {
  colorBar, el, frame, makePanel, num, panelTitle, svgDocument, text,
  xAxis, yAxis, type Panel,
} from "../svg.js";

export const CONTOUR_LEVELS = [0.2, 0.4, 0.6, 0.8];

// The even-odd heat fluctuation lives in [0, 1/2], so the color scale is
// pinned to that range regardless of the sampled grid.
const DENSITY_DOMAIN: [number, number] = [0, 0.5];

export type SigmaMapAxes = {
  x: [number, number];
  y: [number, number];
};

export const SIGMA_MAP_AXES: SigmaMapAxes = {
  x: [-1.5, 1.5],
  y: [0, 10],
};

/** Cell boundaries halfway between samples, end cells extended half a step. */
export function cellBounds(v: number[]): number[] {
  const n = v.length;
  if (n === 1) {
    return [v[0] - 0.5, v[0] + 0.5];
  }
  const out = new Array<number>(n + 1);
  out[0] = v[0] - (v[1] - v[0]) / 2;
  for (let i = 1; i < n; i++) {
    out[i] = (v[i - 1] + v[i]) / 2;
  }
  out[n] = v[n - 1] + (v[n - 1] - v[n - 2]) / 2;
  return out;
}

export function densityCells(
  panel: Panel,
  grid: ProductGrid,
  domain: [number, number],
  color: (t: number) => string,
): string {
  const xb = cellBounds(grid.x);
  const yb = cellBounds(grid.y);
  const ny = grid.y.length;
  const parts: string[] = [];
  for (let a = 0; a < grid.x.length; a++) {
    const x0 = panel.xScale(xb[a]);
    const x1 = panel.xScale(xb[a + 1]);
    for (let b = 0; b < ny; b++) {
      const v = grid.values[a * ny + b];
      const y0 = panel.yScale(yb[b + 1]);
      const y1 = panel.yScale(yb[b]);
      const attrs = {
        x: Math.min(x0, x1),
        y: Math.min(y0, y1),
        width: Math.abs(x1 - x0) + 0.1, // overdraw hides hairline seams
        height: Math.abs(y1 - y0) + 0.1,
      };
      if (Number.isNaN(v)) {
        parts.push(el("rect", { ...attrs, fill: "#ddd", class: "invalid" }));
        continue;
      }
      const s = (v - domain[0]) / (domain[1] - domain[0]);
      parts.push(el("rect", { ...attrs, fill: color(Math.max(0, Math.min(1, s))) }));
    }
  }
  return parts.join("");
}

function contourPath(panel: Panel, grid: ProductGrid, level: number): string {
  const steps: string[] = [];
  for (const [x1, y1, x2, y2] of contourSegments(grid, level)) {
    steps.push(
      `M${num(panel.xScale(x1))} ${num(panel.yScale(y1))}` +
        `L${num(panel.xScale(x2))} ${num(panel.yScale(y2))}`,
    );
  }
  return steps.join("");
}

function contourLegend(panel: Panel): string {
  const parts: string[] = [];
  let x = panel.x + 4;
  const y = panel.y + panel.height + 46;
  parts.push(
    `<text x="${num(x)}" y="${num(y)}" font-family="sans-serif" font-size="11">` +
      text("concurrence contours:") + "</text>",
  );
  x += 122;
  for (const level of CONTOUR_LEVELS) {
    parts.push(el("line", {
      x1: x, y1: y - 4, x2: x + 16, y2: y - 4, stroke: "#000", "stroke-width": 1.4,
    }));
    parts.push(
      `<text x="${num(x + 20)}" y="${num(y)}" font-family="sans-serif" font-size="11">` +
        text(String(level)) + "</text>",
    );
    x += 52;
  }
  return parts.join("");
}

/**
 * Heat-fluctuation density over (J, t) with iso-concurrence lines on top.
 * The first table holds the density, the second the concurrence, and both
 * must be sampled on the same grid.
 */
export function renderSigmaMap(
  sigmaTable: Table,
  concurrenceTable: Table,
  axes: SigmaMapAxes = SIGMA_MAP_AXES,
): string {
  const sigma = analyticGrid(sigmaTable);
  const conc = analyticGrid(concurrenceTable);
  if (
    sigma.x.length !== conc.x.length || sigma.y.length !== conc.y.length ||
    sigma.x.some((v, i) => v !== conc.x[i]) ||
    sigma.y.some((v, i) => v !== conc.y[i])
  ) {
    throw new DataError(
      `${concurrenceTable.path}: grid differs from ${sigmaTable.path}; ` +
        "both tables must be sampled on the same (J, t) points",
    );
  }
  const panel = makePanel(56, 28, 380, 300, axes.x, axes.y);
  const parts: string[] = [];
  parts.push(
    `<clipPath id="plotclip">` +
      el("rect", {
        x: panel.x, y: panel.y, width: panel.width, height: panel.height,
      }) +
      "</clipPath>",
  );
  let clipped = densityCells(panel, sigma, DENSITY_DOMAIN, interpolateViridis);
  for (const level of CONTOUR_LEVELS) {
    clipped += el("g", { class: "contour", "data-level": String(level) },
      el("path", {
        d: contourPath(panel, conc, level),
        fill: "none", stroke: "#000", "stroke-width": 1.3,
      }),
    );
  }
  parts.push(el("g", { "clip-path": "url(#plotclip)" }, clipped));
  parts.push(frame(panel));
  parts.push(xAxis(panel, "measurement outcome J"));
  parts.push(yAxis(panel, "time t"));
  parts.push(panelTitle(panel, "even-odd heat fluctuation"));
  parts.push(colorBar(
    panel.x + panel.width + 14, panel.y, panel.height,
    DENSITY_DOMAIN, interpolateViridis, "even-odd heat fluctuation",
  ));
  parts.push(contourLegend(panel));
  return svgDocument(panel.x + panel.width + 96, panel.y + panel.height + 60, parts.join(""));
}
