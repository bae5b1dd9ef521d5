"""States, operators and observables of the two-qubit half-parity setup.

Basis order is (|uu>, |ud>, |du>, |dd>) everywhere. The measured operator
distinguishes the even states |uu> and |dd> from each other but not the two
odd states, which share the eigenvalue 0: a half-parity readout.

Pure states are complex 4-vectors, mixed states 4x4 density matrices; the
observable helpers accept either and dispatch on ndim.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Eigenvalues of the measured operator in basis order (uu, ud, du, dd).
PHI_DIAG = np.array([1.0, 0.0, 0.0, -1.0])
PHI = np.diag(PHI_DIAG)

_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
# sigma_y x sigma_y, the spin-flip conjugation entering the mixed-state
# concurrence.
SPIN_FLIP = np.kron(_SIGMA_Y, _SIGMA_Y).real  # entries are real (+-1)

_NORM_ATOL = 1e-8


def hamiltonian(epsilon: float) -> np.ndarray:
    """System Hamiltonian eps * Phi; commutes with Phi, so the measurement
    is quantum nondemolition."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return epsilon * PHI


def initial_state() -> np.ndarray:
    """Both qubits along +x: amplitudes (1/2, 1/2, 1/2, 1/2)."""
    return np.full(4, 0.5, dtype=complex)


def _check_state(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    if state.shape == (4,):
        norm = float(np.sum(state.real**2 + state.imag**2))
        if abs(norm - 1.0) > _NORM_ATOL:
            raise ValueError(f"state norm^2 = {norm!r}, expected 1")
    elif state.shape == (4, 4):
        tr = float(np.trace(state).real)
        if abs(tr - 1.0) > _NORM_ATOL:
            raise ValueError(f"state trace = {tr!r}, expected 1")
    else:
        raise ValueError(f"state must have shape (4,) or (4, 4), got {state.shape}")
    return state


@dataclass(frozen=True)
class Populations:
    """Diagonal occupations in the measurement basis."""

    p_uu: float
    p_ud: float
    p_du: float
    p_dd: float

    @property
    def p_even(self) -> float:
        return self.p_uu + self.p_dd

    @property
    def p_odd(self) -> float:
        return self.p_ud + self.p_du

    def as_array(self) -> np.ndarray:
        return np.array([self.p_uu, self.p_ud, self.p_du, self.p_dd])


def populations(state: np.ndarray) -> Populations:
    """Measurement-basis populations of a pure or mixed state."""
    state = _check_state(state)
    if state.ndim == 1:
        p = state.real**2 + state.imag**2
    else:
        p = np.diagonal(state).real
    return Populations(float(p[0]), float(p[1]), float(p[2]), float(p[3]))


def phi_expectation(state: np.ndarray) -> float:
    """<Phi> = p_uu - p_dd; lies in [-1, 1]."""
    p = populations(state)
    return p.p_uu - p.p_dd


def internal_energy(state: np.ndarray, epsilon: float) -> float:
    """<H> = eps * <Phi>."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return epsilon * phi_expectation(state)


def concurrence_pure(psi: np.ndarray) -> float:
    """Concurrence of a pure two-qubit state: 2 |a_uu a_dd - a_ud a_du|."""
    psi = _check_state(psi)
    if psi.ndim != 1:
        raise ValueError("concurrence_pure expects a state vector")
    return min(1.0, 2.0 * abs(psi[0] * psi[3] - psi[1] * psi[2]))


def concurrence_wootters(rho: np.ndarray) -> float:
    """Mixed-state concurrence from the spin-flipped eigenvalue spectrum.

    Eigenvalues of rho (Y x Y) rho* (Y x Y) are clipped at zero before the
    square root; numpy's eigensolver failure, if any, propagates.
    """
    rho = _check_state(np.asarray(rho, dtype=complex))
    if rho.ndim != 2:
        raise ValueError("concurrence_wootters expects a density matrix")
    rho_tilde = SPIN_FLIP @ rho.conj() @ SPIN_FLIP
    evals = np.linalg.eigvals(rho @ rho_tilde).real
    lam = np.sqrt(np.clip(evals, 0.0, None))
    lam[::-1].sort()
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def concurrence(state: np.ndarray) -> float:
    """Concurrence of a pure (vector) or mixed (matrix) state."""
    state = np.asarray(state)
    if state.ndim == 1:
        return concurrence_pure(state)
    return concurrence_wootters(state)
