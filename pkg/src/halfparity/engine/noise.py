"""Deterministic per-trajectory Wiener increments.

Each trajectory draws from its own PCG64 substream seeded by
(master_seed, trajectory index), so an ensemble is reproducible element by
element regardless of evaluation order, chunking or backend.
"""

from __future__ import annotations

import numpy as np


def trajectory_rng(master_seed: int, traj_index: int) -> np.random.Generator:
    """Generator for one trajectory's substream."""
    if traj_index < 0:
        raise ValueError(f"traj_index must be nonnegative, got {traj_index}")
    return np.random.default_rng(np.random.SeedSequence((master_seed, traj_index)))


def wiener_increments(
    master_seed: int, traj_index: int, n_steps: int, dt: float
) -> np.ndarray:
    """n_steps Gaussian increments with mean 0 and variance dt."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    rng = trajectory_rng(master_seed, traj_index)
    return rng.normal(0.0, np.sqrt(dt), n_steps)
