import { scaleLinear, type ScaleLinear } from "d3-scale";

// Figures are assembled as plain SVG strings: no DOM, no browser, just
// nested element text. Numbers are shortened to keep the files compact.

export type Attrs = Record<string, string | number>;

export function num(v: number): string {
  const s = v.toPrecision(6);
  return s.includes(".") || s.includes("e")
    ? String(Number(s))
    : s;
}

function escapeAttr(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/"/g, "&quot;");
}

export function el(tag: string, attrs: Attrs, ...children: string[]): string {
  let s = `<${tag}`;
  for (const [key, value] of Object.entries(attrs)) {
    const text = typeof value === "number" ? num(value) : escapeAttr(value);
    s += ` ${key}="${text}"`;
  }
  if (children.length === 0) {
    return s + "/>";
  }
  return s + ">" + children.join("") + `</${tag}>`;
}

export function text(content: string): string {
  return content.replace(/&/g, "&amp;").replace(/</g, "&lt;");
}

export type Scale = ScaleLinear<number, number>;

export function linear(domain: [number, number], range: [number, number]): Scale {
  return scaleLinear(domain, range);
}

export function polylinePoints(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${num(xs[i])},${num(ys[i])}`);
  }
  return parts.join(" ");
}

/** Closed band polygon: the upper edge forward, the lower edge back. */
export function bandPoints(
  xs: number[],
  upper: number[],
  lower: number[],
): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${num(xs[i])},${num(upper[i])}`);
  }
  for (let i = xs.length - 1; i >= 0; i--) {
    parts.push(`${num(xs[i])},${num(lower[i])}`);
  }
  return parts.join(" ");
}

const AXIS_FONT = "font-family=\"sans-serif\" font-size=\"11\"";

export type Panel = {
  x: number; // left edge of the plot box in figure coordinates
  y: number; // top edge
  width: number;
  height: number;
  xScale: Scale;
  yScale: Scale;
};

export function makePanel(
  x: number,
  y: number,
  width: number,
  height: number,
  xDomain: [number, number],
  yDomain: [number, number],
): Panel {
  return {
    x, y, width, height,
    xScale: linear(xDomain, [x, x + width]),
    yScale: linear(yDomain, [y + height, y]), // y grows downward in SVG
  };
}

export function frame(panel: Panel): string {
  return el("rect", {
    x: panel.x, y: panel.y, width: panel.width, height: panel.height,
    fill: "none", stroke: "#000", "stroke-width": 1,
  });
}

export function xAxis(panel: Panel, label: string, tickCount = 6): string {
  const parts: string[] = [];
  const y0 = panel.y + panel.height;
  for (const t of panel.xScale.ticks(tickCount)) {
    const px = panel.xScale(t);
    parts.push(el("line", {
      x1: px, y1: y0, x2: px, y2: y0 + 4, stroke: "#000",
    }));
    parts.push(
      `<text x="${num(px)}" y="${num(y0 + 16)}" text-anchor="middle" ${AXIS_FONT}>` +
        text(String(t)) + "</text>",
    );
  }
  parts.push(
    `<text x="${num(panel.x + panel.width / 2)}" y="${num(y0 + 32)}"` +
      ` text-anchor="middle" ${AXIS_FONT}>` + text(label) + "</text>",
  );
  return parts.join("");
}

export function yAxis(panel: Panel, label: string, tickCount = 6): string {
  const parts: string[] = [];
  for (const t of panel.yScale.ticks(tickCount)) {
    const py = panel.yScale(t);
    parts.push(el("line", {
      x1: panel.x - 4, y1: py, x2: panel.x, y2: py, stroke: "#000",
    }));
    parts.push(
      `<text x="${num(panel.x - 7)}" y="${num(py + 3.5)}" text-anchor="end" ${AXIS_FONT}>` +
        text(String(t)) + "</text>",
    );
  }
  const cx = panel.x - 34;
  const cy = panel.y + panel.height / 2;
  parts.push(
    `<text x="${num(cx)}" y="${num(cy)}" text-anchor="middle" ${AXIS_FONT}` +
      ` transform="rotate(-90 ${num(cx)} ${num(cy)})">` + text(label) + "</text>",
  );
  return parts.join("");
}

export function panelTitle(panel: Panel, title: string): string {
  return (
    `<text x="${num(panel.x + panel.width / 2)}" y="${num(panel.y - 6)}"` +
      ` text-anchor="middle" ${AXIS_FONT}>` + text(title) + "</text>"
  );
}

/** Vertical color bar with its own value axis on the right. */
export function colorBar(
  x: number,
  y: number,
  height: number,
  domain: [number, number],
  color: (t: number) => string,
  label: string,
): string {
  const width = 12;
  const steps = 64;
  const parts: string[] = [];
  const scale = linear(domain, [y + height, y]);
  for (let i = 0; i < steps; i++) {
    const y0 = y + (height * (steps - 1 - i)) / steps;
    parts.push(el("rect", {
      x, y: y0, width, height: height / steps + 0.5,
      fill: color(i / (steps - 1)),
    }));
  }
  parts.push(el("rect", {
    x, y, width, height, fill: "none", stroke: "#000", "stroke-width": 0.5,
  }));
  for (const t of scale.ticks(5)) {
    const py = scale(t);
    parts.push(el("line", {
      x1: x + width, y1: py, x2: x + width + 3, y2: py, stroke: "#000",
    }));
    parts.push(
      `<text x="${num(x + width + 5)}" y="${num(py + 3.5)}" ${AXIS_FONT}>` +
        text(String(t)) + "</text>",
    );
  }
  const cx = x + width + 34;
  const cy = y + height / 2;
  parts.push(
    `<text x="${num(cx)}" y="${num(cy)}" text-anchor="middle" ${AXIS_FONT}` +
      ` transform="rotate(90 ${num(cx)} ${num(cy)})">` + text(label) + "</text>",
  );
  return parts.join("");
}

export function svgDocument(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}"` +
      ` viewBox="0 0 ${width} ${height}">` +
    el("rect", { x: 0, y: 0, width, height, fill: "#fff" }) +
    body +
    "</svg>\n"
  );
}
