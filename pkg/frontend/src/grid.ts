import { DataError, numericColumn, requireColumns, type Table } from "./csv.js";

// Both grid-shaped CSVs are written as full product grids: the analytic
// tables J-major over (J, t), the rate tables t_i-major over (t_i, delta_t).
// Reassembly recovers the two axes and checks the ordering is exactly that.

export type ProductGrid = {
  x: number[]; // outer axis, one entry per block
  y: number[]; // inner axis, cycling fastest
  values: Float64Array; // values[a * y.length + b]
};

function uniqueInOrder(column: Float64Array): number[] {
  const seen = new Set<number>();
  const out: number[] = [];
  for (const v of column) {
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}

/** Rebuilds an outer-major product grid from three columns of a table. */
export function productGrid(
  table: Table,
  outerName: string,
  innerName: string,
  valueName: string,
): ProductGrid {
  const outer = numericColumn(table, outerName);
  const inner = numericColumn(table, innerName);
  const values = numericColumn(table, valueName);
  const x = uniqueInOrder(outer);
  const y = uniqueInOrder(inner);
  if (x.length * y.length !== values.length) {
    throw new DataError(
      `${table.path}: ${values.length} rows do not fill a ` +
        `${x.length} x ${y.length} (${outerName}, ${innerName}) grid`,
    );
  }
  for (let i = 0; i < values.length; i++) {
    const a = Math.floor(i / y.length);
    const b = i % y.length;
    if (outer[i] !== x[a] || inner[i] !== y[b]) {
      throw new DataError(
        `${table.path}: line ${i + 2} breaks ${outerName}-major grid order`,
      );
    }
  }
  return { x, y, values };
}

export const ANALYTIC_COLUMNS = ["J", "t", "value"];

/** Closed-form table on a (J, t) product grid, J-major. */
export function analyticGrid(table: Table): ProductGrid {
  requireColumns(table, ANALYTIC_COLUMNS);
  return productGrid(table, "J", "t", "value");
}

export const RATE_GRID_COLUMNS = [
  "t_i", "delta_t", "tau", "eta", "success_rate", "error_rate",
  "n_entangled", "n_separable",
];

export type RateGrid = {
  tI: number[];
  deltaT: number[];
  success: Float64Array; // success[i * deltaT.length + l]
  tau: Float64Array; // per cell; equals delta_t when tau tracks the window
  eta: number;
};

/** Estimator success rates over the (t_i, delta_t) window grid. */
export function rateGrid(table: Table): RateGrid {
  requireColumns(table, RATE_GRID_COLUMNS);
  const grid = productGrid(table, "t_i", "delta_t", "success_rate");
  const eta = numericColumn(table, "eta");
  return {
    tI: grid.x,
    deltaT: grid.y,
    success: grid.values,
    tau: numericColumn(table, "tau"),
    eta: eta[0],
  };
}

/** Caption text for a rate grid's averaging-time setting. */
export function tauLabel(grid: RateGrid): string {
  const n = grid.deltaT.length;
  let tracks = true;
  for (let i = 0; i < grid.tau.length; i++) {
    if (grid.tau[i] !== grid.deltaT[i % n]) {
      tracks = false;
      break;
    }
  }
  if (tracks && n > 1) {
    return "τ = Δt";
  }
  return `τ = ${grid.tau[0]}`;
}

export type Crossing = { tI: number; deltaT: number };

/**
 * Earliest t_i per delta_t row from which the success rate stays at or
 * above level: invalid (nan) cells pass the suffix condition but cannot be
 * the crossing point themselves. Rows with no such point are skipped.
 */
export function sustainedCrossings(grid: RateGrid, level = 0.5): Crossing[] {
  const n = grid.deltaT.length;
  const out: Crossing[] = [];
  for (let l = 0; l < n; l++) {
    let crossing = -1;
    for (let i = grid.tI.length - 1; i >= 0; i--) {
      const s = grid.success[i * n + l];
      if (Number.isNaN(s)) {
        continue; // invalid cell, suffix condition unaffected
      }
      if (s >= level) {
        crossing = i;
      } else {
        break; // suffix from here fails
      }
    }
    if (crossing >= 0) {
      out.push({ tI: grid.tI[crossing], deltaT: grid.deltaT[l] });
    }
  }
  return out;
}
