"""Closed-form trajectory quantities conditioned on the integrated readout.

Because the measurement is QND, everything about a trajectory at time t is a
function of the time-averaged readout J and t alone. Each function here takes
(j, t) plus rates and broadcasts over array input.

All expressions are evaluated through v = exp(2 Gamma t - logcosh(4 Gamma J t))
with a log-domain cosh, so they stay finite for |J| t >> 1 where cosh would
overflow.
"""

from __future__ import annotations

import numpy as np

_LN2 = np.log(2.0)


def _check_rates(gamma: float, epsilon: float | None = None) -> None:
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if epsilon is not None and epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")


def _check_time(t, allow_zero: bool = True):
    t = np.asarray(t, dtype=float)
    bad = (t < 0.0) if allow_zero else (t <= 0.0)
    if np.any(bad):
        kind = "nonnegative" if allow_zero else "positive"
        raise ValueError(f"t must be {kind}")
    return t


def _log_cosh(y: np.ndarray) -> np.ndarray:
    # log cosh y = |y| + log1p(exp(-2|y|)) - log 2, overflow-free
    a = np.abs(y)
    return a + np.log1p(np.exp(-2.0 * a)) - _LN2


def _v(j, t, gamma):
    """v = e^{2 Gamma t} / cosh(4 Gamma J t), the odd-to-even weight ratio."""
    j = np.asarray(j, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.exp(2.0 * gamma * t - _log_cosh(4.0 * gamma * j * t))


def norm_factor(j, t, gamma: float = 1.0):
    """Norm sqrt((1 + 1/v)/2) of the unnormalized conditioned state, i.e. the
    square root of the record's likelihood weight (initial amplitudes 1/2)."""
    _check_rates(gamma)
    t = _check_time(t)
    v = _v(j, t, gamma)
    return np.sqrt(0.5 * (1.0 + 1.0 / v))


def state_given_outcome(j, t, gamma: float = 1.0, epsilon: float = 1.0):
    """Normalized conditioned state; shape broadcast(j, t) + (4,)."""
    _check_rates(gamma, epsilon)
    t = _check_time(t)
    j = np.asarray(j, dtype=float)
    j, t = np.broadcast_arrays(j, t)
    # log-magnitudes of the unnormalized amplitudes, relative to the odd pair
    la = gamma * t * (2.0 * j - 1.0)
    ld = gamma * t * (-2.0 * j - 1.0)
    m = np.maximum(np.maximum(la, ld), 0.0)
    wa = np.exp(la - m)
    wb = np.exp(-m)
    wd = np.exp(ld - m)
    norm = np.sqrt(wa**2 + 2.0 * wb**2 + wd**2)
    phase = np.exp(-1j * epsilon * t)
    out = np.empty(np.shape(j) + (4,), dtype=complex)
    out[..., 0] = wa * phase / norm
    out[..., 1] = wb / norm
    out[..., 2] = wb / norm
    out[..., 3] = wd * np.conj(phase) / norm
    return out


def concurrence_given_outcome(j, t, gamma: float = 1.0):
    """C(J, t) = (1 - e^{-2 Gamma t}) * v / (1 + v)."""
    _check_rates(gamma)
    t = _check_time(t)
    v = _v(j, t, gamma)
    return -np.expm1(-2.0 * gamma * t) * v / (1.0 + v)


def _q_tilde(j, t, gamma):
    """<Phi> along the conditioned trajectory: tanh(4 Gamma J t) / (1 + v)."""
    y = 4.0 * gamma * np.asarray(j, dtype=float) * np.asarray(t, dtype=float)
    v = _v(j, t, gamma)
    return np.tanh(y) / (1.0 + v)


def heat_given_outcome(j, t, gamma: float = 1.0, epsilon: float = 1.0):
    """Accumulated measurement heat Q(J, t) = eps * <Phi>(J, t); odd in J."""
    _check_rates(gamma, epsilon)
    t = _check_time(t)
    return epsilon * _q_tilde(j, t, gamma)


def heat_fluctuation(j, t, gamma: float = 1.0):
    """Dimensionless heat-increment variance sigma_tilde = Var<Phi> of the
    conditioned state: (v + e^{-4 Gamma t} v^2) / (1 + v)^2; 1/2 at t = 0."""
    _check_rates(gamma)
    t = _check_time(t)
    v = _v(j, t, gamma)
    return (v + np.exp(-4.0 * gamma * t) * v**2) / (1.0 + v) ** 2


def heat_fluctuation_eo(j, t, gamma: float = 1.0):
    """Even-odd part of the heat fluctuation: p_even * p_odd = v/(1+v)^2."""
    _check_rates(gamma)
    t = _check_time(t)
    v = _v(j, t, gamma)
    return v / (1.0 + v) ** 2


def concurrence_rate(j, t, gamma: float = 1.0):
    """Record-averaged dC/dt at fixed J:
    2 Gamma (e^{-2 Gamma t} v^2 + v)/(1+v)^2 - 4 Gamma <Phi>^2 C."""
    _check_rates(gamma)
    t = _check_time(t)
    v = _v(j, t, gamma)
    gain = 2.0 * gamma * (np.exp(-2.0 * gamma * t) * v**2 + v) / (1.0 + v) ** 2
    q = _q_tilde(j, t, gamma)
    c = concurrence_given_outcome(j, t, gamma)
    return gain - 4.0 * gamma * q**2 * c


def concurrence_rate_bounds(j, t, gamma: float = 1.0):
    """Heat-measurable bracket (lower, upper) of the concurrence rate:
    2 Gamma [sigma_tilde - 2 <Phi>^2 C] and 2 Gamma [2 sigma_tilde - 2 <Phi>^2 C].
    """
    _check_rates(gamma)
    t = _check_time(t)
    sig = heat_fluctuation(j, t, gamma)
    q = _q_tilde(j, t, gamma)
    c = concurrence_given_outcome(j, t, gamma)
    loss = 2.0 * q**2 * c
    lower = 2.0 * gamma * (sig - loss)
    upper = 2.0 * gamma * (2.0 * sig - loss)
    return lower, upper


def long_time_identity_residual(t, gamma: float = 1.0):
    """Residual of dC/dt(J=0) - 4 Gamma * p_even * p_odd; identically zero.

    At J = 0 the heat fluctuation is purely even-odd, so the lower bound is
    tight and the rate reduces to 4 Gamma sigma_eo exactly.
    """
    _check_rates(gamma)
    t = _check_time(t)
    return concurrence_rate(0.0, t, gamma) - 4.0 * gamma * heat_fluctuation_eo(
        0.0, t, gamma
    )


def outcome_density(j, t, gamma: float = 1.0, weights=(0.25, 0.5, 0.25)):
    """Ensemble density of the integrated readout J(t): a three-component
    normal mixture centered at (+1, 0, -1) with variance 1/(4 Gamma t).

    weights are the (even+, odd, even-) probabilities and must sum to 1.
    """
    _check_rates(gamma)
    t = _check_time(t, allow_zero=False)
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,):
        raise ValueError("weights must be three numbers (even+, odd, even-)")
    if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-9:
        raise ValueError("weights must be nonnegative and sum to 1")
    j = np.asarray(j, dtype=float)
    var = 1.0 / (4.0 * gamma * t)
    pref = 1.0 / np.sqrt(2.0 * np.pi * var)
    dens = (
        w[0] * np.exp(-((j - 1.0) ** 2) / (2.0 * var))
        + w[1] * np.exp(-(j**2) / (2.0 * var))
        + w[2] * np.exp(-((j + 1.0) ** 2) / (2.0 * var))
    )
    return pref * dens
