"""Pure-Python integration kernels.

Same contract as the compiled module halfparity.engine._kernel; this is the
import-time fallback and the ground truth the compiled kernels are tested
against. Both kernels advance a state through all increments in dw and fill
caller-allocated output arrays:

- pops[k]: measurement-basis populations before step k (k = 0..n included),
- rec[k]: readout sample of step k (k = 0..n-1),
- conc[k] (pure only): concurrence before step k,
- states[i]: state at step index store_idx[i] (sorted, unique, in [0, n]).

Return value is -1 on success, else the index of the step whose pre-
renormalization norm left [0.5, 1.5] (diverged step).

The stochastic update multiplies each amplitude by
    f_i = 1 + (-i eps phi_i - (Gamma/2)(phi_i - m)^2) dt
            + sqrt(eta Gamma) dW (phi_i - m),
with m = <Phi> before the step, then renormalizes. For density matrices the
same factors act from both sides and the record-independent remainder
(1 - eta) Gamma dt A rho A (A = diag(phi_i - m)) is added, which keeps rho
positive at finite dt; eta = 1 reproduces the pure update exactly on
projectors.
"""

from __future__ import annotations

import numpy as np

_PHI = np.array([1.0, 0.0, 0.0, -1.0])


def sse_path(psi0, dw, gamma, epsilon, dt, store_idx, states, pops, rec, conc):
    """Integrate a normalized state vector through len(dw) steps."""
    psi = np.asarray(psi0, dtype=complex).copy()
    n = dw.shape[0]
    sg = np.sqrt(gamma)
    drift = -1j * epsilon * _PHI * dt
    si = 0
    for k in range(n):
        p = psi.real**2 + psi.imag**2
        pops[k] = p
        conc[k] = 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2])
        if si < store_idx.shape[0] and store_idx[si] == k:
            states[si] = psi
            si += 1
        m = p[0] - p[3]
        a = _PHI - m
        f = 1.0 + drift - 0.5 * gamma * a * a * dt + sg * dw[k] * a
        psi = f * psi
        norm2 = float(np.sum(psi.real**2 + psi.imag**2))
        if not 0.25 <= norm2 <= 2.25:
            return k
        psi /= np.sqrt(norm2)
        rec[k] = m + dw[k] / (2.0 * sg * dt)
    p = psi.real**2 + psi.imag**2
    pops[n] = p
    conc[n] = 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2])
    if si < store_idx.shape[0] and store_idx[si] == n:
        states[si] = psi
    return -1


def sme_path(rho0, dw, gamma, epsilon, eta, dt, store_idx, states, pops, rec):
    """Integrate a density matrix through len(dw) steps."""
    rho = np.asarray(rho0, dtype=complex).copy()
    n = dw.shape[0]
    seg = np.sqrt(eta * gamma)
    drift = -1j * epsilon * _PHI * dt
    rest = (1.0 - eta) * gamma * dt
    si = 0
    for k in range(n):
        diag = np.diagonal(rho).real
        pops[k] = diag
        if si < store_idx.shape[0] and store_idx[si] == k:
            states[si] = rho
            si += 1
        m = diag[0] - diag[3]
        a = _PHI - m
        f = 1.0 + drift - 0.5 * gamma * a * a * dt + seg * dw[k] * a
        rho = f[:, None] * rho * f.conj()[None, :] + rest * (
            a[:, None] * a[None, :] * rho
        )
        tr = float(np.trace(rho).real)
        if not 0.5 <= tr <= 1.5:
            return k
        rho /= tr
        rec[k] = m + dw[k] / (2.0 * seg * dt)
    diag = np.diagonal(rho).real
    pops[n] = diag
    if si < store_idx.shape[0] and store_idx[si] == n:
        states[si] = rho
    return -1
