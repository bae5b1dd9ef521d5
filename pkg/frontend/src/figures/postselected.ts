import {
  DataError, numericColumn, requireColumns, stringColumn, type Table,
} from "../csv.js";
import {
  bandPoints, el, frame, makePanel, panelTitle, polylinePoints, svgDocument,
  text, xAxis, yAxis, type Panel,
} from "../svg.js";

export const SUMMARY_COLUMNS = [
  "t", "class", "mean_C", "mean_Q", "sem_C", "sem_Q", "count",
];

// Fixed per-class colors; the labels are the ones the producer writes.
const CLASS_COLOR: Record<string, string> = {
  odd: "#d62728",
  even_plus: "#1f77b4",
  even_minus: "#2ca02c",
  all: "#777777",
};

const CLASS_TEXT: Record<string, string> = {
  odd: "odd",
  even_plus: "even +",
  even_minus: "even −",
  all: "all",
};

export type PostselectedAxes = {
  x: [number, number];
  y: [number, number]; // concurrence panel
  y2: [number, number]; // heat panel
};

export const POSTSELECTED_AXES: PostselectedAxes = {
  x: [0, 10],
  y: [0, 1.05],
  y2: [-1.3, 1.3],
};

type Series = {
  label: string;
  t: number[];
  meanC: number[];
  meanQ: number[];
  semC: number[];
  semQ: number[];
};

function splitByClass(table: Table): Series[] {
  const t = numericColumn(table, "t");
  const label = stringColumn(table, "class");
  const meanC = numericColumn(table, "mean_C");
  const meanQ = numericColumn(table, "mean_Q");
  const semC = numericColumn(table, "sem_C");
  const semQ = numericColumn(table, "sem_Q");
  const series = new Map<string, Series>();
  for (let i = 0; i < t.length; i++) {
    if (!(label[i] in CLASS_COLOR)) {
      throw new DataError(
        `${table.path}: line ${i + 2}: unknown outcome class ${label[i]}`,
      );
    }
    let s = series.get(label[i]);
    if (s === undefined) {
      s = { label: label[i], t: [], meanC: [], meanQ: [], semC: [], semQ: [] };
      series.set(label[i], s);
    }
    s.t.push(t[i]);
    s.meanC.push(meanC[i]);
    s.meanQ.push(meanQ[i]);
    s.semC.push(semC[i]);
    s.semQ.push(semQ[i]);
  }
  return [...series.values()];
}

function drawSeries(
  panel: Panel,
  s: Series,
  mean: number[],
  sem: number[],
): string {
  // An empty class writes all-nan means; split into finite runs so any
  // such gap breaks the line instead of producing a bogus bridge.
  const parts: string[] = [];
  let run: number[] = [];
  const flush = () => {
    if (run.length === 0) {
      return;
    }
    const xs = run.map((i) => panel.xScale(s.t[i]));
    const upper = run.map((i) => panel.yScale(mean[i] + sem[i]));
    const lower = run.map((i) => panel.yScale(mean[i] - sem[i]));
    const ys = run.map((i) => panel.yScale(mean[i]));
    if (run.length > 1) {
      parts.push(el("polygon", {
        points: bandPoints(xs, upper, lower),
        fill: CLASS_COLOR[s.label], "fill-opacity": 0.15, stroke: "none",
      }));
    }
    parts.push(el("polyline", {
      points: polylinePoints(xs, ys),
      fill: "none", stroke: CLASS_COLOR[s.label], "stroke-width": 1.6,
      class: "series", "data-class": s.label,
    }));
    run = [];
  };
  for (let i = 0; i < s.t.length; i++) {
    if (Number.isFinite(mean[i])) {
      run.push(i);
    } else {
      flush();
    }
  }
  flush();
  return parts.join("");
}

function legend(panel: Panel, series: Series[]): string {
  const parts: string[] = [];
  let y = panel.y + 14;
  for (const s of series) {
    const x = panel.x + panel.width - 74;
    parts.push(el("line", {
      x1: x, y1: y - 4, x2: x + 18, y2: y - 4,
      stroke: CLASS_COLOR[s.label], "stroke-width": 1.6,
    }));
    parts.push(
      `<text x="${x + 23}" y="${y}" font-family="sans-serif" font-size="11">` +
        text(CLASS_TEXT[s.label]) + "</text>",
    );
    y += 15;
  }
  return parts.join("");
}

/** Two panels of classwise ensemble averages: concurrence and heat. */
export function renderPostselected(
  table: Table,
  axes: PostselectedAxes = POSTSELECTED_AXES,
): string {
  requireColumns(table, SUMMARY_COLUMNS);
  const series = splitByClass(table);
  const panelW = 300;
  const panelH = 230;
  const left = makePanel(52, 28, panelW, panelH, axes.x, axes.y);
  const right = makePanel(52 + panelW + 64, 28, panelW, panelH, axes.x, axes.y2);
  const parts: string[] = [];
  for (const s of series) {
    parts.push(drawSeries(left, s, s.meanC, s.semC));
    parts.push(drawSeries(right, s, s.meanQ, s.semQ));
  }
  parts.push(frame(left), frame(right));
  parts.push(xAxis(left, "time t"), yAxis(left, "mean concurrence"));
  parts.push(xAxis(right, "time t"), yAxis(right, "mean heat"));
  parts.push(panelTitle(left, "post-selected concurrence"));
  parts.push(panelTitle(right, "post-selected heat"));
  parts.push(legend(right, series));
  return svgDocument(52 + panelW + 64 + panelW + 16, 28 + panelH + 44, parts.join(""));
}
