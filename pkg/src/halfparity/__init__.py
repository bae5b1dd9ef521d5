"""Two qubits under weak continuous half-parity measurement.

Trajectory-level simulation of the diffusive measurement record, closed-form
solutions conditioned on the integrated readout, measurement-heat accounting,
and a single-shot energetic estimator of the entangled (odd-parity) outcome.
"""

from .config import ConfigError, EstimatorConfig, SimulationConfig
from .states import (
    PHI,
    PHI_DIAG,
    Populations,
    concurrence,
    concurrence_pure,
    concurrence_wootters,
    hamiltonian,
    initial_state,
    internal_energy,
    phi_expectation,
    populations,
)
from .trajectory import IntegrationError, TrajectoryRecord, run_trajectory

__version__ = "0.1.0"

__all__ = [
    "PHI",
    "PHI_DIAG",
    "ConfigError",
    "EstimatorConfig",
    "IntegrationError",
    "Populations",
    "SimulationConfig",
    "TrajectoryRecord",
    "concurrence",
    "concurrence_pure",
    "concurrence_wootters",
    "hamiltonian",
    "initial_state",
    "internal_energy",
    "phi_expectation",
    "populations",
    "run_trajectory",
    "__version__",
]
