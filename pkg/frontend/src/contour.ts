import type { ProductGrid } from "./grid.js";

// Iso-line extraction by marching squares on the sample grid, with linear
// interpolation along cell edges, so a contour of a linear field lands at
// the exact analytic position. Output is a soup of short line segments in
// data coordinates; joined polygons are not needed to stroke the curves.

export type Segment = [number, number, number, number];

type Point = [number, number];

function lerp(
  p0: Point,
  v0: number,
  p1: Point,
  v1: number,
  level: number,
): Point {
  const t = (level - v0) / (v1 - v0);
  return [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])];
}

/** All level-set segments of the grid's scalar field. */
export function contourSegments(grid: ProductGrid, level: number): Segment[] {
  const { x, y, values } = grid;
  const ny = y.length;
  const out: Segment[] = [];
  for (let a = 0; a + 1 < x.length; a++) {
    for (let b = 0; b + 1 < ny; b++) {
      const vbl = values[a * ny + b];
      const vbr = values[(a + 1) * ny + b];
      const vtl = values[a * ny + b + 1];
      const vtr = values[(a + 1) * ny + b + 1];
      if (
        Number.isNaN(vbl) || Number.isNaN(vbr) ||
        Number.isNaN(vtl) || Number.isNaN(vtr)
      ) {
        continue;
      }
      const bl = vbl >= level;
      const br = vbr >= level;
      const tl = vtl >= level;
      const tr = vtr >= level;
      if (bl === br && br === tl && tl === tr) {
        continue;
      }
      const pbl: Point = [x[a], y[b]];
      const pbr: Point = [x[a + 1], y[b]];
      const ptl: Point = [x[a], y[b + 1]];
      const ptr: Point = [x[a + 1], y[b + 1]];
      const crossings: { edge: "bottom" | "right" | "top" | "left"; p: Point }[] = [];
      if (bl !== br) {
        crossings.push({ edge: "bottom", p: lerp(pbl, vbl, pbr, vbr, level) });
      }
      if (br !== tr) {
        crossings.push({ edge: "right", p: lerp(pbr, vbr, ptr, vtr, level) });
      }
      if (tl !== tr) {
        crossings.push({ edge: "top", p: lerp(ptl, vtl, ptr, vtr, level) });
      }
      if (bl !== tl) {
        crossings.push({ edge: "left", p: lerp(pbl, vbl, ptl, vtl, level) });
      }
      if (crossings.length === 2) {
        const [p, q] = crossings;
        out.push([p.p[0], p.p[1], q.p[0], q.p[1]]);
        continue;
      }
      // Saddle: both diagonals disagree; the cell-center average decides
      // whether the above-level region connects through the middle.
      const centerAbove = (vbl + vbr + vtl + vtr) / 4 >= level;
      const byEdge = new Map(crossings.map((c) => [c.edge, c.p]));
      const pairs: ["bottom" | "top", "left" | "right"][] =
        centerAbove === bl
          ? [["bottom", "right"], ["top", "left"]]
          : [["bottom", "left"], ["top", "right"]];
      for (const [e1, e2] of pairs) {
        const p = byEdge.get(e1)!;
        const q = byEdge.get(e2)!;
        out.push([p[0], p[1], q[0], q[1]]);
      }
    }
  }
  return out;
}
