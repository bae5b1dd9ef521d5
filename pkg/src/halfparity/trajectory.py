"""Single-trajectory integration and the full trajectory record.

A record keeps everything downstream analysis needs: the readout samples and
their running time average, full-resolution populations and heat increments,
and the quantum state at the stored step indices. Step-indexed arrays follow
one convention throughout: index k of a per-step array (wiener, record,
running_outcome, heat_steps*) belongs to the step from t_k to t_{k+1}, while
node arrays (populations, heat, concurrence) have n_steps + 1 entries on the
time grid t_0 .. t_max.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import engine
from .config import SimulationConfig
from .states import PHI_DIAG, concurrence_wootters, initial_state

_STEP_NORM_ATOL = 1e-8


class IntegrationError(RuntimeError):
    """A stochastic step left the admissible norm window [0.5, 1.5]."""

    def __init__(self, message, traj_index=None, step=None):
        super().__init__(message)
        self.traj_index = traj_index
        self.step = step


@dataclass
class TrajectoryRecord:
    """One measurement record and its conditioned evolution.

    states holds pure state vectors (eta = 1) or density matrices (eta < 1)
    at the step indices in state_steps; concurrence is the full-resolution
    pure-state series and None for mixed records (use concurrence_series).
    heat is the exact energy balance on the time grid, while heat_steps is
    the per-step stochastic increment split into heat_steps_even and
    heat_steps_eo; the two agree up to O(dt) per step.
    """

    traj_index: int
    config: SimulationConfig
    wiener: np.ndarray
    record: np.ndarray
    running_outcome: np.ndarray
    populations: np.ndarray
    heat_steps: np.ndarray
    heat_steps_even: np.ndarray
    heat_steps_eo: np.ndarray
    heat: np.ndarray
    concurrence: np.ndarray | None
    states: np.ndarray
    state_steps: np.ndarray

    @property
    def pure(self) -> bool:
        return self.states.ndim == 2

    @property
    def times(self) -> np.ndarray:
        return self.config.times()

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_outcome(self) -> float:
        return float(self.running_outcome[-1])

    def final_concurrence(self) -> float:
        if self.pure:
            return float(self.concurrence[-1])
        return concurrence_wootters(self.states[-1])

    def concurrence_series(self) -> np.ndarray:
        """Concurrence at the stored step indices (full grid when pure)."""
        if self.pure:
            return self.concurrence
        return np.array([concurrence_wootters(rho) for rho in self.states])

    def outcome_at(self, t: float) -> float:
        return integrated_outcome(self, t)


def integrated_outcome(record: TrajectoryRecord, t: float) -> float:
    """J(t), the readout averaged over [0, t]; t must sit on the step grid
    and be positive (J is undefined at t = 0)."""
    dt = record.config.dt
    k = round(t / dt)
    if abs(k * dt - t) > 1e-6 * dt:
        raise ValueError(f"t = {t} does not lie on the step grid (dt = {dt})")
    if k < 1 or k > record.running_outcome.shape[0]:
        raise ValueError(f"t = {t} outside (0, t_max]")
    return float(record.running_outcome[k - 1])


def _step_factors(m, dw, cfg):
    a = PHI_DIAG - m
    return (
        1.0
        - 1j * cfg.epsilon * PHI_DIAG * cfg.dt
        - 0.5 * cfg.gamma * a * a * cfg.dt
        + np.sqrt(cfg.eta * cfg.gamma) * dw * a
    )


def sse_step(state: np.ndarray, dw: float, cfg: SimulationConfig):
    """One pure-state update; returns (new state, readout sample).

    Pure conditioned evolution needs the full record, so eta must be 1.
    """
    if cfg.eta != 1.0:
        raise ValueError("sse_step requires eta = 1; use sme_step for eta < 1")
    psi = np.asarray(state, dtype=complex)
    p = psi.real**2 + psi.imag**2
    norm = float(p.sum())
    if psi.shape != (4,) or abs(norm - 1.0) > _STEP_NORM_ATOL:
        raise ValueError("state must be a normalized 4-vector")
    m = float(p[0] - p[3])
    psi = _step_factors(m, dw, cfg) * psi
    norm2 = float(np.sum(psi.real**2 + psi.imag**2))
    if not 0.25 <= norm2 <= 2.25:
        raise IntegrationError(f"step norm {np.sqrt(norm2):g} left [0.5, 1.5]")
    psi /= np.sqrt(norm2)
    sample = m + dw / (2.0 * np.sqrt(cfg.gamma) * cfg.dt)
    return psi, sample


def sme_step(state: np.ndarray, dw: float, cfg: SimulationConfig):
    """One density-matrix update; returns (new matrix, readout sample).

    The update is the positivity-preserving factored form: the pure-state
    step factors act from both sides and the record-independent remainder
    (1 - eta) Gamma dt A rho A is added before trace renormalization.
    """
    rho = np.asarray(state, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("state must be a 4x4 density matrix")
    diag = np.diagonal(rho).real
    if abs(float(diag.sum()) - 1.0) > _STEP_NORM_ATOL:
        raise ValueError("state must have unit trace")
    m = float(diag[0] - diag[3])
    a = PHI_DIAG - m
    f = _step_factors(m, dw, cfg)
    rho = f[:, None] * rho * f.conj()[None, :] + (
        (1.0 - cfg.eta) * cfg.gamma * cfg.dt
    ) * (a[:, None] * a[None, :] * rho)
    tr = float(np.trace(rho).real)
    if not 0.5 <= tr <= 1.5:
        raise IntegrationError(f"step trace {tr:g} left [0.5, 1.5]")
    rho /= tr
    sample = m + dw / (2.0 * np.sqrt(cfg.eta * cfg.gamma) * cfg.dt)
    return rho, sample


def run_trajectory(
    cfg: SimulationConfig, traj_index: int, *, states_stride: int | None = None
) -> TrajectoryRecord:
    """Integrate trajectory traj_index of the ensemble defined by cfg.

    The noise comes from the (master_seed, traj_index) substream, so the same
    arguments always give bit-identical records on a given backend. Pure
    evolution runs when eta = 1, density-matrix evolution otherwise.
    states_stride overrides cfg.record_stride for state storage (populations
    and heat always stay at full resolution); the final step is stored
    regardless of stride.
    """
    n = cfg.n_steps
    stride = cfg.record_stride if states_stride is None else int(states_stride)
    if stride < 1:
        raise ValueError(f"states_stride must be positive, got {states_stride}")
    dw = engine.wiener_increments(cfg.master_seed, traj_index, n, cfg.dt)
    store = np.arange(0, n + 1, stride, dtype=np.int64)
    if store[-1] != n:
        store = np.append(store, np.int64(n))
    pops = np.empty((n + 1, 4))
    rec = np.empty(n)
    pure = cfg.eta == 1.0
    if pure:
        conc = np.empty(n + 1)
        states = np.empty((store.size, 4), dtype=complex)
        status = engine.sse_path(
            initial_state(), dw, cfg.gamma, cfg.epsilon, cfg.dt,
            store, states, pops, rec, conc,
        )
    else:
        conc = None
        psi0 = initial_state()
        states = np.empty((store.size, 4, 4), dtype=complex)
        status = engine.sme_path(
            np.outer(psi0, psi0.conj()), dw, cfg.gamma, cfg.epsilon, cfg.eta,
            cfg.dt, store, states, pops, rec,
        )
    if status != -1:
        raise IntegrationError(
            f"trajectory {traj_index}: norm left [0.5, 1.5] at step {status}"
            f" (t = {status * cfg.dt:g})",
            traj_index=traj_index,
            step=int(status),
        )

    jw = np.cumsum(rec) / np.arange(1, n + 1)
    pre = pops[:-1]
    scale = 2.0 * cfg.epsilon * np.sqrt(cfg.eta * cfg.gamma) * dw
    dq_e = scale * 4.0 * pre[:, 0] * pre[:, 3]
    dq_eo = scale * (pre[:, 0] + pre[:, 3]) * (pre[:, 1] + pre[:, 2])
    # cumulative heat comes from the exact energy balance Q = U(t) - U(0);
    # summing the per-step increments instead would accumulate an O(dt)
    # random walk that eventually swamps the exponentially decaying
    # fluctuation scale of converged trajectories
    energy = cfg.epsilon * (pops[:, 0] - pops[:, 3])
    heat = energy - energy[0]
    if pure:
        dq = dq_e + dq_eo
    else:
        dq = np.diff(energy)

    return TrajectoryRecord(
        traj_index=traj_index,
        config=cfg,
        wiener=dw,
        record=rec,
        running_outcome=jw,
        populations=pops,
        heat_steps=dq,
        heat_steps_even=dq_e,
        heat_steps_eo=dq_eo,
        heat=heat,
        concurrence=conc,
        states=states,
        state_steps=store,
    )
