"""Trajectory-level heat accounting and postselected ensemble statistics.

The readout time average sorts records into three classes: both qubits up
(J near +1), both down (J near -1), or the entangled odd-parity pair (J near
0). Heat increments split into an even part, fed by the uu/dd coherence, and
an even-odd part, which is the one that witnesses the odd sector.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .config import SimulationConfig
from .trajectory import TrajectoryRecord, integrated_outcome

# classification needs the readout distributions separated; their width is
# 1/sqrt(4 Gamma t), so require Gamma t >= 6 before calling a class
_MIN_CLASSIFY_GAMMA_T = 6.0


class OutcomeClass(Enum):
    ODD = "odd"
    EVEN_PLUS = "even_plus"
    EVEN_MINUS = "even_minus"


@dataclass
class HeatSeries:
    """Step heat increments of one trajectory.

    increments_scaled is dQ/(2 eps sqrt(Gamma dt)), the dimensionless form
    whose square enters the fluctuation estimator. For eta < 1 the even /
    even-odd parts are leading-order only and need not sum to increments.
    """

    increments: np.ndarray
    increments_even: np.ndarray
    increments_eo: np.ndarray
    cumulative: np.ndarray
    increments_scaled: np.ndarray


def _scaled(dq: np.ndarray, cfg: SimulationConfig) -> np.ndarray:
    return dq / (2.0 * cfg.epsilon * np.sqrt(cfg.gamma * cfg.dt))


def heat_increments(record: TrajectoryRecord) -> HeatSeries:
    """Recompute the heat series from the stored states.

    Requires every step's state, i.e. a record integrated with stride 1;
    subsampled records are rejected because the increments are not
    reconstructible from a thinned state series.
    """
    cfg = record.config
    n = cfg.n_steps
    if record.state_steps.shape[0] != n + 1:
        raise ValueError(
            "heat increments need stride-1 state storage; this record kept "
            f"{record.state_steps.shape[0]} of {n + 1} states"
        )
    if record.pure:
        pops = record.states.real**2 + record.states.imag**2
    else:
        pops = np.diagonal(record.states, axis1=1, axis2=2).real
    pre = pops[:-1]
    scale = 2.0 * cfg.epsilon * np.sqrt(cfg.eta * cfg.gamma) * record.wiener
    dq_e = scale * 4.0 * pre[:, 0] * pre[:, 3]
    dq_eo = scale * (pre[:, 0] + pre[:, 3]) * (pre[:, 1] + pre[:, 2])
    if record.pure:
        dq = dq_e + dq_eo
    else:
        dq = np.diff(cfg.epsilon * (pops[:, 0] - pops[:, 3]))
    return HeatSeries(
        increments=dq,
        increments_even=dq_e,
        increments_eo=dq_eo,
        cumulative=np.concatenate(([0.0], np.cumsum(dq))),
        increments_scaled=_scaled(dq, cfg),
    )


def energy_difference_gap(record: TrajectoryRecord) -> float:
    """|sum of per-step heat increments - (U_final - U_initial)|.

    Zero by construction for mixed records; O(dt) discretization noise for
    pure ones, whose increments are the leading stochastic form.
    """
    cfg = record.config
    u = cfg.epsilon * (record.populations[:, 0] - record.populations[:, 3])
    return float(abs(record.heat_steps.sum() - (u[-1] - u[0])))


def classify_trajectory(
    record: TrajectoryRecord, t_classify: float | None = None
) -> OutcomeClass:
    """Sort a record by its integrated readout at t_classify (default t_max);
    |J| < 1/2 reads as the odd class."""
    cfg = record.config
    if t_classify is None:
        t_classify = cfg.t_max
    if cfg.gamma * t_classify < _MIN_CLASSIFY_GAMMA_T - 1e-9:
        raise ValueError(
            f"classification at Gamma t = {cfg.gamma * t_classify:g} is not "
            f"reliable; need Gamma t >= {_MIN_CLASSIFY_GAMMA_T:g}"
        )
    j = integrated_outcome(record, t_classify)
    if j > 0.5:
        return OutcomeClass.EVEN_PLUS
    if j < -0.5:
        return OutcomeClass.EVEN_MINUS
    return OutcomeClass.ODD


def coarse_grained_fluctuation(
    series: HeatSeries, t: float, tau: float, cfg: SimulationConfig
) -> float:
    """rms of the scaled heat increments over [t, t + tau] clipped to t_max."""
    if tau < cfg.dt:
        raise ValueError(f"tau = {tau} must be at least dt = {cfg.dt}")
    if t < 0 or t >= cfg.t_max:
        raise ValueError(f"t = {t} outside [0, t_max)")
    n = cfg.n_steps
    k0 = int(np.ceil(t / cfg.dt - 1e-9))
    k1 = min(int(np.ceil((t + tau) / cfg.dt - 1e-9)), n)
    if k1 <= k0:
        raise ValueError(f"window [{t}, {t + tau}] contains no step")
    sq = series.increments_scaled[k0:k1]
    return float(np.sqrt(np.mean(sq * sq)))


@dataclass
class ClassSummary:
    """Mean and standard error of C(t) and Q(t) over one class."""

    label: str
    count: int
    mean_concurrence: np.ndarray
    sem_concurrence: np.ndarray
    mean_heat: np.ndarray
    sem_heat: np.ndarray


@dataclass
class EnsembleSummary:
    times: np.ndarray
    classes: dict[str, ClassSummary]


class _Accumulator:
    def __init__(self, nt):
        self.count = 0
        self.sum_c = np.zeros(nt)
        self.sumsq_c = np.zeros(nt)
        self.sum_q = np.zeros(nt)
        self.sumsq_q = np.zeros(nt)

    def add(self, c, q):
        self.count += 1
        self.sum_c += c
        self.sumsq_c += c * c
        self.sum_q += q
        self.sumsq_q += q * q

    def summary(self, label):
        cnt = self.count
        if cnt == 0:
            nt = self.sum_c.shape[0]
            nanarr = np.full(nt, np.nan)
            return ClassSummary(label, 0, nanarr, nanarr.copy(), nanarr.copy(),
                                nanarr.copy())
        mean_c = self.sum_c / cnt
        mean_q = self.sum_q / cnt
        if cnt > 1:
            var_c = np.clip(self.sumsq_c / cnt - mean_c**2, 0.0, None)
            var_q = np.clip(self.sumsq_q / cnt - mean_q**2, 0.0, None)
            sem_c = np.sqrt(var_c * cnt / (cnt - 1) / cnt)
            sem_q = np.sqrt(var_q * cnt / (cnt - 1) / cnt)
        else:
            sem_c = np.full_like(mean_c, np.nan)
            sem_q = np.full_like(mean_q, np.nan)
        return ClassSummary(label, cnt, mean_c, sem_c, mean_q, sem_q)


def postselected_averages(
    records, t_classify: float | None = None, classify: bool = True
) -> EnsembleSummary:
    """Classwise averages of concurrence and heat over an ensemble.

    records is any iterable of TrajectoryRecord (a generator keeps memory
    flat); sampling times are the stored-state times of the first record and
    must agree across the ensemble. With classify=False only the
    unconditional "all" entry is produced, for runs too short to classify.
    """
    labels = [c.value for c in OutcomeClass] if classify else []
    accs = None
    times = None
    steps = None
    for record in records:
        if accs is None:
            steps = record.state_steps
            times = record.times[steps]
            accs = {label: _Accumulator(times.shape[0]) for label in labels}
            accs["all"] = _Accumulator(times.shape[0])
        elif record.state_steps.shape != steps.shape or np.any(
            record.state_steps != steps
        ):
            raise ValueError("records sample different step grids")
        if record.pure:
            c = record.concurrence[steps]
        else:
            c = record.concurrence_series()
        q = record.heat[steps]
        accs["all"].add(c, q)
        if classify:
            accs[classify_trajectory(record, t_classify).value].add(c, q)
    if accs is None:
        raise ValueError("no records to average")
    for label in labels:
        if accs[label].count == 0:
            warnings.warn(f"outcome class {label!r} is empty", stacklevel=2)
    return EnsembleSummary(
        times=times,
        classes={label: acc.summary(label) for label, acc in accs.items()},
    )
