"""Single-shot energetic estimation of the measurement outcome.

The estimator reads one record's heat increments, nothing else. Over a
window starting at t_i with length delta_t it averages
    2 Qtilde_k^2 - R_k(tau),
where Qtilde_k is the accumulated heat in units of eps and R_k is the rms of
the scaled increments over [t_k, t_k + tau]. A negative average flags the
odd (entangled) outcome: only that branch keeps producing heat fluctuations
without accumulating mean heat.

witness() is the analytic-reference variant that replaces R_k by the
closed-form fluctuation at the trajectory's own (J(t_k), t_k); it needs a
perfectly efficient record (eta = 1).

All windows snap to the step grid; a window [t, t + L] covers the steps
k = ceil(t/dt) .. ceil((t + L)/dt) - 1, clipped to the last step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import closedform
from .config import TAU_TRACKS_WINDOW, SimulationConfig
from .trajectory import TrajectoryRecord, run_trajectory

_SNAP = 1e-9


def _window_steps(t_start: float, length: float, dt: float, n: int):
    k0 = int(np.ceil(t_start / dt - _SNAP))
    k1 = min(int(np.ceil((t_start + length) / dt - _SNAP)), n)
    return k0, k1


def _check_window(t_i: float, delta_t: float, cfg: SimulationConfig):
    if t_i < 0:
        raise ValueError(f"t_i must be nonnegative, got {t_i}")
    if delta_t <= 0:
        raise ValueError(f"delta_t must be positive, got {delta_t}")
    if t_i + delta_t > cfg.t_max * (1.0 + 1e-9):
        raise ValueError(
            f"window [{t_i}, {t_i + delta_t}] extends past t_max = {cfg.t_max}"
        )
    k0, k1 = _window_steps(t_i, delta_t, cfg.dt, cfg.n_steps)
    if k1 <= k0:
        raise ValueError(f"window [{t_i}, {t_i + delta_t}] contains no step")
    return k0, k1


def _scaled_square(record: TrajectoryRecord) -> np.ndarray:
    cfg = record.config
    sq = record.heat_steps / (2.0 * cfg.epsilon * np.sqrt(cfg.gamma * cfg.dt))
    return sq * sq


def witness(record: TrajectoryRecord, t_i: float, delta_t: float) -> float:
    """Window average of 2 Qtilde^2 - sigma_tilde(J(t), t); negative flags
    the odd outcome. Exact fluctuation reference, so eta must be 1."""
    cfg = record.config
    if cfg.eta != 1.0:
        raise ValueError("witness needs an eta = 1 record")
    k0, k1 = _check_window(t_i, delta_t, cfg)
    q = record.heat[k0:k1] / cfg.epsilon
    # J is undefined at t = 0 but sigma_tilde(., 0) = 1/2 for every J,
    # so any placeholder works at k = 0
    j_nodes = np.concatenate(([0.0], record.running_outcome))[k0:k1]
    t_nodes = record.times[k0:k1]
    sig = closedform.heat_fluctuation(j_nodes, t_nodes, cfg.gamma)
    return float(np.mean(2.0 * q * q - sig))


def single_shot_estimate(
    record: TrajectoryRecord, t_i: float, delta_t: float, tau: float
) -> float:
    """Window average of 2 Qtilde^2 - R(tau) from one record's heat alone."""
    cfg = record.config
    if tau < cfg.dt * (1.0 - 1e-9):
        raise ValueError(f"tau = {tau} must be at least dt = {cfg.dt}")
    k0, k1 = _check_window(t_i, delta_t, cfg)
    n = cfg.n_steps
    m_tau = max(1, int(round(tau / cfg.dt)))
    sq = _scaled_square(record)
    # tail sums, not forward prefix sums: the squares decay exponentially
    # once a trajectory converges, and a forward prefix difference would
    # cancel to rounding noise exactly where the true window sum is tiny
    tail = np.concatenate((np.cumsum(sq[::-1])[::-1], [0.0]))
    k = np.arange(k0, k1)
    hi = np.minimum(k + m_tau, n)
    r = np.sqrt((tail[k] - tail[hi]) / (hi - k))
    q = record.heat[k0:k1] / cfg.epsilon
    return float(np.mean(2.0 * q * q - r))


@dataclass
class CellRates:
    """Success/error bookkeeping of one estimation window."""

    t_i: float
    delta_t: float
    tau: float
    success_rate: float
    error_rate: float
    n_entangled: int
    n_separable: int


@dataclass
class RateGrid:
    """Success and error rates of the estimator over a (t_i, delta_t) grid.

    success[i, l] is the fraction of truly entangled records (final
    concurrence >= threshold) with a negative estimate in window
    (t_i_values[i], delta_t_values[l]); error is the same fraction among the
    separable records. tau is the averaging time, or None when it tracks
    delta_t row by row. Windows reaching past t_max truncate there; cells
    whose effective window holds no step (delta_t = 0 or t_i >= t_max) hold
    nan.
    """

    t_i_values: np.ndarray
    delta_t_values: np.ndarray
    tau: float | None
    eta: float
    threshold: float
    success: np.ndarray
    error: np.ndarray
    n_entangled: int
    n_separable: int

    def cell(self, t_i: float, delta_t: float) -> CellRates:
        i = int(np.argmin(np.abs(self.t_i_values - t_i)))
        l = int(np.argmin(np.abs(self.delta_t_values - delta_t)))
        tau = self.delta_t_values[l] if self.tau is None else self.tau
        return CellRates(
            float(self.t_i_values[i]),
            float(self.delta_t_values[l]),
            float(tau),
            float(self.success[i, l]),
            float(self.error[i, l]),
            self.n_entangled,
            self.n_separable,
        )


@dataclass
class ScanResult:
    grids: list
    cells: list
    final_outcomes: np.ndarray
    final_concurrences: np.ndarray


def default_axis(cfg: SimulationConfig, points: int = 26, span: float | None = None):
    """Evenly spaced window axis [0, span] (span defaults to t_max)."""
    if span is None:
        span = cfg.t_max
    if points < 2:
        raise ValueError(f"axis needs at least 2 points, got {points}")
    if span <= 0 or span > cfg.t_max * (1.0 + 1e-9):
        raise ValueError(f"axis span {span} outside (0, t_max]")
    return np.linspace(0.0, span, points)


def scan_rates(
    cfg: SimulationConfig,
    taus=(TAU_TRACKS_WINDOW,),
    *,
    t_i_values=None,
    delta_t_values=None,
    threshold: float = 0.8,
    cells=(),
    progress=None,
) -> ScanResult:
    """Run the cfg ensemble once and rate every requested estimator setting.

    taus entries are averaging times (floats, each >= dt) or the string
    "delta_t" for tau tracking the window length; one RateGrid per entry.
    cells are extra (t_i, delta_t, tau) windows rated individually. The
    ensemble streams trajectory by trajectory, so memory stays flat in
    n_traj. progress, if given, is called as progress(done, total).
    """
    n = cfg.n_steps
    dt = cfg.dt
    t_i_values = (
        default_axis(cfg) if t_i_values is None else np.asarray(t_i_values, float)
    )
    delta_t_values = (
        default_axis(cfg)
        if delta_t_values is None
        else np.asarray(delta_t_values, float)
    )
    if np.any(t_i_values < 0) or np.any(delta_t_values < 0):
        raise ValueError("grid axes must be nonnegative")

    # window index bounds per cell; windows reaching past t_max truncate
    # there, matching the inner coarse-graining convention, so a cell is
    # invalid only when its effective window holds no step. Invalid cells
    # are masked by `valid` and only need legal (clamped) indices.
    k0 = np.ceil(t_i_values / dt - _SNAP).astype(np.int64)
    k1 = np.minimum(
        np.ceil((t_i_values[:, None] + delta_t_values[None, :]) / dt - _SNAP), n
    ).astype(np.int64)
    valid = (delta_t_values[None, :] > 0) & (k0[:, None] < n) & (k1 > k0[:, None])
    k0 = np.minimum(k0, n - 1)
    k1 = np.clip(k1, k0[:, None] + 1, n)

    m_of_l = np.maximum(1, np.round(delta_t_values / dt).astype(np.int64))
    tau_specs = []
    needed_ms = set()
    for tau in taus:
        if tau == TAU_TRACKS_WINDOW:
            tau_specs.append(None)
            needed_ms.update(int(m) for m in m_of_l)
        else:
            tau = float(tau)
            if tau < dt * (1.0 - 1e-9):
                raise ValueError(f"tau = {tau} must be at least dt = {dt}")
            tau_specs.append(max(1, int(round(tau / dt))))
            needed_ms.add(tau_specs[-1])

    cell_index = []
    for t_i, delta_t, tau in cells:
        ck0, ck1 = _check_window(t_i, delta_t, cfg)
        if tau < dt * (1.0 - 1e-9):
            raise ValueError(f"tau = {tau} must be at least dt = {dt}")
        cm = max(1, int(round(tau / dt)))
        cell_index.append((ck0, ck1, cm))
        needed_ms.add(cm)

    shape = (t_i_values.shape[0], delta_t_values.shape[0])
    ent_neg = [np.zeros(shape, dtype=np.int64) for _ in taus]
    sep_neg = [np.zeros(shape, dtype=np.int64) for _ in taus]
    cell_ent_neg = np.zeros(len(cell_index), dtype=np.int64)
    cell_sep_neg = np.zeros(len(cell_index), dtype=np.int64)
    n_ent = 0
    n_sep = 0
    final_j = np.empty(cfg.n_traj)
    final_c = np.empty(cfg.n_traj)

    idx = np.arange(n)
    for traj in range(cfg.n_traj):
        record = run_trajectory(cfg, traj, states_stride=n)
        sq = _scaled_square(record)
        # tail sums for the same cancellation reason as single_shot_estimate
        tail = np.concatenate((np.cumsum(sq[::-1])[::-1], [0.0]))
        qt = record.heat / cfg.epsilon
        a = np.concatenate(([0.0], np.cumsum(2.0 * qt[:-1] ** 2)))
        b_for = {}
        for m in needed_ms:
            hi = np.minimum(idx + m, n)
            r = np.sqrt((tail[idx] - tail[hi]) / (hi - idx))
            b_for[m] = np.concatenate(([0.0], np.cumsum(r)))

        fc = record.final_concurrence()
        entangled = fc >= threshold
        final_j[traj] = record.final_outcome
        final_c[traj] = fc
        if entangled:
            n_ent += 1
        else:
            n_sep += 1

        for g, m_spec in enumerate(tau_specs):
            if m_spec is None:
                est = np.empty(shape)
                for l, m in enumerate(m_of_l):
                    b = b_for[int(m)]
                    est[:, l] = a[k1[:, l]] - a[k0] - (b[k1[:, l]] - b[k0])
            else:
                b = b_for[m_spec]
                est = a[k1] - a[k0[:, None]] - (b[k1] - b[k0[:, None]])
            neg = est < 0.0
            if entangled:
                ent_neg[g] += neg
            else:
                sep_neg[g] += neg

        for c, (ck0, ck1, cm) in enumerate(cell_index):
            b = b_for[cm]
            est = a[ck1] - a[ck0] - (b[ck1] - b[ck0])
            if est < 0.0:
                if entangled:
                    cell_ent_neg[c] += 1
                else:
                    cell_sep_neg[c] += 1

        if progress is not None:
            progress(traj + 1, cfg.n_traj)

    def _rate(count, total):
        return np.where(valid, count / total if total else np.nan, np.nan)

    grids = []
    for g, (tau, m_spec) in enumerate(zip(taus, tau_specs)):
        grids.append(
            RateGrid(
                t_i_values=t_i_values,
                delta_t_values=delta_t_values,
                tau=None if m_spec is None else float(tau),
                eta=cfg.eta,
                threshold=threshold,
                success=_rate(ent_neg[g], n_ent),
                error=_rate(sep_neg[g], n_sep),
                n_entangled=n_ent,
                n_separable=n_sep,
            )
        )
    out_cells = []
    for c, (t_i, delta_t, tau) in enumerate(cells):
        out_cells.append(
            CellRates(
                t_i=float(t_i),
                delta_t=float(delta_t),
                tau=float(tau),
                success_rate=cell_ent_neg[c] / n_ent if n_ent else np.nan,
                error_rate=cell_sep_neg[c] / n_sep if n_sep else np.nan,
                n_entangled=n_ent,
                n_separable=n_sep,
            )
        )
    return ScanResult(
        grids=grids,
        cells=out_cells,
        final_outcomes=final_j,
        final_concurrences=final_c,
    )


def sustained_crossing(
    grid: RateGrid, delta_t: float = 0.3, level: float = 0.5
) -> float:
    """Earliest grid t_i from which the success rate stays >= level.

    Scans the delta_t row nearest the requested value and returns the
    smallest t_i grid point whose whole valid suffix satisfies the level;
    nan when no such point exists.
    """
    l = int(np.argmin(np.abs(grid.delta_t_values - delta_t)))
    col = grid.success[:, l]
    valid = np.isfinite(col)
    if not np.any(valid):
        return float("nan")
    ok = np.where(valid, col >= level, True)
    suffix_ok = np.logical_and.accumulate(ok[::-1])[::-1]
    hit = valid & (col >= level) & suffix_ok
    if not np.any(hit):
        return float("nan")
    return float(grid.t_i_values[int(np.argmax(hit))])
