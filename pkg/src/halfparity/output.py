"""CSV and manifest writers shared by the command-line tools.

All CSVs use LF line endings, a mandatory header row, floats printed with
17 significant digits (so a round trip through text is value-exact) and the
literal token nan for undefined entries.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import time
from dataclasses import asdict

import numpy as np

from . import __version__
from .engine import BACKEND
from .states import concurrence_wootters

TRAJECTORY_COLUMNS = [
    "traj", "t", "I", "J", "C", "Q", "dQ", "dQ_e", "dQ_eo",
    "p_uu", "p_ud", "p_du", "p_dd", "dW",
]
SUMMARY_COLUMNS = ["t", "class", "mean_C", "mean_Q", "sem_C", "sem_Q", "count"]
RATE_GRID_COLUMNS = [
    "t_i", "delta_t", "tau", "eta", "success_rate", "error_rate",
    "n_entangled", "n_separable",
]


def fmt(x) -> str:
    """17-significant-digit float formatting; nan prints as nan."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return "%.17g" % x


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_trajectory_csv(path, records) -> int:
    """One row per stored step per record; step quantities (I, dW, dQ...)
    belong to the step ending at the row's time, so the t = 0 row holds nan
    there. Returns the number of data rows."""
    rows = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        for record in records:
            cfg = record.config
            times = record.times
            if record.pure:
                conc = record.concurrence[record.state_steps]
            else:
                conc = np.array(
                    [concurrence_wootters(rho) for rho in record.states]
                )
            for i, k in enumerate(record.state_steps):
                k = int(k)
                if k == 0:
                    step = ["nan"] * 2  # I, J
                    heat_cols = ["nan"] * 3
                    dw = "nan"
                else:
                    step = [fmt(record.record[k - 1]),
                            fmt(record.running_outcome[k - 1])]
                    heat_cols = [fmt(record.heat_steps[k - 1]),
                                 fmt(record.heat_steps_even[k - 1]),
                                 fmt(record.heat_steps_eo[k - 1])]
                    dw = fmt(record.wiener[k - 1])
                p = record.populations[k]
                w.writerow(
                    [str(record.traj_index), fmt(times[k])]
                    + step
                    + [fmt(conc[i]), fmt(record.heat[k])]
                    + heat_cols
                    + [fmt(p[0]), fmt(p[1]), fmt(p[2]), fmt(p[3]), dw]
                )
                rows += 1
    return rows


def write_summary_csv(path, summary) -> int:
    """Classwise ensemble averages, class-major then time-ordered."""
    rows = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for label, cls in summary.classes.items():
            for i, t in enumerate(summary.times):
                w.writerow([
                    fmt(t), label,
                    fmt(cls.mean_concurrence[i]), fmt(cls.mean_heat[i]),
                    fmt(cls.sem_concurrence[i]), fmt(cls.sem_heat[i]),
                    str(cls.count),
                ])
                rows += 1
    return rows


def write_rate_grid_csv(path, grid) -> int:
    """One row per (t_i, delta_t) cell, t_i-major; invalid cells keep nan
    rates. The tau column holds the cell's averaging time (equal to delta_t
    when tau tracks the window)."""
    rows = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(RATE_GRID_COLUMNS)
        for i, t_i in enumerate(grid.t_i_values):
            for l, delta_t in enumerate(grid.delta_t_values):
                tau = delta_t if grid.tau is None else grid.tau
                w.writerow([
                    fmt(t_i), fmt(delta_t), fmt(tau), fmt(grid.eta),
                    fmt(grid.success[i, l]), fmt(grid.error[i, l]),
                    str(grid.n_entangled), str(grid.n_separable),
                ])
                rows += 1
    return rows


def write_analytic_csv(path, j_values, t_values, columns: dict) -> int:
    """Closed-form quantities on the J x t product grid, J-major.

    columns maps column name -> 2d array of shape (len(j), len(t)).
    """
    names = list(columns)
    rows = 0
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(["J", "t"] + names)
        for a, j in enumerate(j_values):
            for b, t in enumerate(t_values):
                w.writerow(
                    [fmt(j), fmt(t)] + [fmt(columns[name][a, b]) for name in names]
                )
                rows += 1
    return rows


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class ManifestWriter:
    """Collects a command's outputs and writes manifest.json next to them.

    The manifest echoes the fully resolved configuration, names the backend
    and package version, and records a sha256 per output file, so a rerun
    can be checked for bit-identical results.
    """

    def __init__(self, out_dir, command: str, config, extra: dict | None = None):
        self.out_dir = out_dir
        self.command = command
        self.config = config
        self.extra = extra or {}
        self.outputs = []
        self._t0 = time.perf_counter()

    def add(self, path, rows: int | None = None):
        entry = {"file": path.name, "sha256": file_sha256(path)}
        if rows is not None:
            entry["rows"] = rows
        self.outputs.append(entry)

    def write(self) -> None:
        cfg = self.config
        if not isinstance(cfg, dict):
            cfg = asdict(cfg)
        doc = {
            "command": self.command,
            "version": __version__,
            "backend": BACKEND,
            "config": cfg,
            "duration_s": round(time.perf_counter() - self._t0, 3),
            "outputs": self.outputs,
        }
        doc.update(self.extra)
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=False)
            fh.write("\n")
