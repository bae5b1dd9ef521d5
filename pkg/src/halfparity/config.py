"""Run configuration and the flat key=value config-file format.

Config files hold one `key = value` pair per line, keys named exactly after
the dataclass fields below; `#` starts a comment, blank lines are ignored,
list values are comma-separated. parse_config(dump_config(d)) round-trips.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np


class ConfigError(ValueError):
    """A configuration value violates its contract."""


@dataclass(frozen=True)
class SimulationConfig:
    """Ensemble-level integration parameters.

    dt and t_max must tile exactly: n_steps = t_max/dt up to rounding.
    Gamma*dt <= 0.01 keeps the explicit stochastic step in its accuracy
    regime; larger products are rejected rather than silently integrated.
    """

    gamma: float = 1.0
    epsilon: float = 1.0
    dt: float = 1e-3
    t_max: float = 10.0
    eta: float = 1.0
    n_traj: int = 800
    master_seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if self.gamma <= 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.dt <= 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.t_max < self.dt:
            raise ConfigError(
                f"t_max must be at least dt, got t_max={self.t_max} dt={self.dt}"
            )
        if self.gamma * self.dt > 0.01 + 1e-12:
            raise ConfigError(
                f"gamma*dt = {self.gamma * self.dt:g} exceeds the 0.01 step limit"
            )
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must be in (0, 1], got {self.eta}")
        if not isinstance(self.n_traj, int) or self.n_traj < 1:
            raise ConfigError(f"n_traj must be a positive integer, got {self.n_traj}")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ConfigError(
                f"master_seed must be an integer in [0, 2^64), got {self.master_seed}"
            )
        if not isinstance(self.record_stride, int) or self.record_stride < 1:
            raise ConfigError(
                f"record_stride must be a positive integer, got {self.record_stride}"
            )
        n = round(self.t_max / self.dt)
        if n < 1 or abs(n * self.dt - self.t_max) > 1e-9 * self.t_max:
            raise ConfigError(
                f"t_max = {self.t_max} is not an integer multiple of dt = {self.dt}"
            )

    @property
    def n_steps(self) -> int:
        return round(self.t_max / self.dt)

    def times(self) -> np.ndarray:
        """Step-grid times t_k = k dt, k = 0..n_steps."""
        return np.arange(self.n_steps + 1) * self.dt


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimation-window parameters.

    t_i + delta_t <= t_max and tau >= dt are enforced where a
    SimulationConfig is in scope, since neither dt nor t_max lives here.
    """

    t_i: float = 0.0
    delta_t: float = 0.3
    tau: float = 0.3
    eta: float = 1.0
    concurrence_threshold: float = 0.8

    def __post_init__(self):
        if self.t_i < 0:
            raise ConfigError(f"t_i must be nonnegative, got {self.t_i}")
        if self.delta_t <= 0:
            raise ConfigError(f"delta_t must be positive, got {self.delta_t}")
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError(f"eta must be in (0, 1], got {self.eta}")
        if not 0.0 < self.concurrence_threshold <= 1.0:
            raise ConfigError(
                "concurrence_threshold must be in (0, 1], got "
                f"{self.concurrence_threshold}"
            )


_INT_KEYS = {"n_traj", "master_seed", "record_stride", "grid_points"}
_FLOAT_KEYS = {
    "gamma",
    "epsilon",
    "dt",
    "t_max",
    "eta",
    "t_i",
    "delta_t",
    "tau",
    "concurrence_threshold",
    "grid_max",
}
_LIST_KEYS = {"tau_list", "eta_list"}
KNOWN_KEYS = _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS

# tau_list entries may be numbers or this token, meaning "tau tracks the
# window length delta_t row by row".
TAU_TRACKS_WINDOW = "delta_t"


def _parse_value(key: str, text: str):
    if key in _INT_KEYS:
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigError(f"{key} must be an integer, got {text!r}") from exc
    if key in _FLOAT_KEYS:
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"{key} must be a number, got {text!r}") from exc
    items = []
    for raw in text.split(","):
        raw = raw.strip()
        if not raw:
            raise ConfigError(f"{key} has an empty list entry in {text!r}")
        if key == "tau_list" and raw == TAU_TRACKS_WINDOW:
            items.append(TAU_TRACKS_WINDOW)
            continue
        try:
            items.append(float(raw))
        except ValueError as exc:
            raise ConfigError(f"{key} entry {raw!r} is not a number") from exc
    return tuple(items)


def parse_config(text: str) -> dict:
    """Parse flat key=value text into a {key: typed value} mapping."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        if not value:
            raise ConfigError(f"line {lineno}: key {key!r} has no value")
        out[key] = _parse_value(key, value)
    return out


def dump_config(mapping: dict) -> str:
    """Serialize a mapping back to config-file text; floats keep full
    precision so parse_config(dump_config(d)) == d."""
    lines = []
    for key in sorted(mapping):
        value = mapping[key]
        if key in _LIST_KEYS:
            text = ", ".join(
                v if isinstance(v, str) else repr(float(v)) for v in value
            )
        elif key in _INT_KEYS:
            text = str(int(value))
        else:
            text = repr(float(value))
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"


def simulation_config_from_mapping(mapping: dict, **overrides) -> SimulationConfig:
    """Build a SimulationConfig from parsed config plus keyword overrides;
    keys outside the SimulationConfig fields are ignored here (they may
    belong to the estimator section of the same file)."""
    names = {f.name for f in fields(SimulationConfig)}
    kwargs = {k: v for k, v in mapping.items() if k in names}
    for key, value in overrides.items():
        if value is not None:
            kwargs[key] = value
    try:
        return SimulationConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
