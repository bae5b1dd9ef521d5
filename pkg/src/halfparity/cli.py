"""Command-line interface.

Three subcommands, each writing CSVs plus a manifest.json into --out:

- simulate: run a trajectory ensemble; writes trajectories.csv (the first
  --save-traj records at the stored resolution) and summary.csv (classwise
  ensemble averages over all trajectories).
- analytic: tabulate a closed-form quantity on a (J, t) product grid.
- estimator-grid: rate the single-shot estimator over (t_i, delta_t) windows;
  one rate_grid CSV per (tau, eta) pair.

Exit codes: 0 success, 1 invalid configuration or arguments, 2 integration
failure, 3 output I/O failure. Flat key=value --config files are read first,
then explicit flags override them.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, closedform, estimator, output
from .config import (
    TAU_TRACKS_WINDOW,
    ConfigError,
    parse_config,
    simulation_config_from_mapping,
)
from .trajectory import IntegrationError, run_trajectory

_MIN_CLASSIFY_GAMMA_T = analysis._MIN_CLASSIFY_GAMMA_T


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ConfigError (exit code 1)."""

    def error(self, message):
        raise ConfigError(message)


def _add_common_flags(p):
    p.add_argument("--config", type=Path, help="flat key=value config file")
    p.add_argument("--gamma", type=float, help="measurement rate")
    p.add_argument("--epsilon", type=float, help="level splitting")
    p.add_argument("--dt", type=float, help="step size")
    p.add_argument("--tmax", type=float, help="trajectory length")
    p.add_argument("--eta", type=float, help="detection efficiency")
    p.add_argument("--ntraj", type=int, help="ensemble size")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", type=Path, default=Path("."),
                   help="output directory (default: current directory)")


def _load_mapping(args):
    if args.config is None:
        return {}
    return parse_config(args.config.read_text())


def _sim_config(args, mapping, **defaults):
    overrides = dict(
        gamma=args.gamma, epsilon=args.epsilon, dt=args.dt, t_max=args.tmax,
        eta=args.eta, n_traj=args.ntraj, master_seed=args.seed,
    )
    for key, value in defaults.items():
        if overrides.get(key) is None and key not in mapping:
            overrides[key] = value
    return simulation_config_from_mapping(mapping, **overrides)


def _out_dir(args) -> Path:
    args.out.mkdir(parents=True, exist_ok=True)
    return args.out


def cmd_simulate(args) -> int:
    mapping = _load_mapping(args)
    cfg = _sim_config(args, mapping)
    if args.save_traj < 0:
        raise ConfigError(f"--save-traj must be nonnegative, got {args.save_traj}")
    out = _out_dir(args)
    manifest = output.ManifestWriter(out, "simulate", cfg)

    n_save = min(args.save_traj, cfg.n_traj)
    traj_path = out / "trajectories.csv"
    rows = output.write_trajectory_csv(
        traj_path, (run_trajectory(cfg, i) for i in range(n_save))
    )
    manifest.add(traj_path, rows)

    classify = cfg.gamma * cfg.t_max >= _MIN_CLASSIFY_GAMMA_T - 1e-9
    if not classify:
        print(
            f"note: Gamma*t_max = {cfg.gamma * cfg.t_max:g} < "
            f"{_MIN_CLASSIFY_GAMMA_T:g}; summary has only class=all rows",
            file=sys.stderr,
        )
    summary = analysis.postselected_averages(
        (run_trajectory(cfg, i) for i in range(cfg.n_traj)), classify=classify
    )
    summary_path = out / "summary.csv"
    rows = output.write_summary_csv(summary_path, summary)
    manifest.add(summary_path, rows)
    manifest.write()
    return 0


_ANALYTIC_QUANTITIES = {
    "concurrence": lambda j, t, g, e: {"value": closedform.concurrence_given_outcome(j, t, g)},
    "heat": lambda j, t, g, e: {"value": closedform.heat_given_outcome(j, t, g, e)},
    "sigma": lambda j, t, g, e: {"value": closedform.heat_fluctuation(j, t, g)},
    "sigma-eo": lambda j, t, g, e: {"value": closedform.heat_fluctuation_eo(j, t, g)},
    "norm": lambda j, t, g, e: {"value": closedform.norm_factor(j, t, g)},
    "pdf": lambda j, t, g, e: {"value": closedform.outcome_density(j, t, g)},
    "dcdt": lambda j, t, g, e: {"value": closedform.concurrence_rate(j, t, g)},
}


def _analytic_columns(quantity, j, t, gamma, epsilon):
    jj, tt = np.meshgrid(j, t, indexing="ij")
    if quantity == "bounds":
        lower, upper = closedform.concurrence_rate_bounds(jj, tt, gamma)
        return {
            "lower": lower,
            "dcdt": closedform.concurrence_rate(jj, tt, gamma),
            "upper": upper,
        }
    return _ANALYTIC_QUANTITIES[quantity](jj, tt, gamma, epsilon)


def cmd_analytic(args) -> int:
    gamma = args.gamma if args.gamma is not None else 1.0
    epsilon = args.epsilon if args.epsilon is not None else 1.0
    if args.jn < 1 or args.tn < 1:
        raise ConfigError("--jn and --tn must be positive")
    if args.tmin is None:
        args.tmin = args.tmax if args.tn == 1 else 0.0
    if args.tmin < 0 or args.tmax < args.tmin:
        raise ConfigError("need 0 <= tmin <= tmax")
    if args.quantity == "pdf" and args.tmin <= 0:
        raise ConfigError("pdf needs tmin > 0 (undefined at t = 0)")
    j = np.linspace(args.jmin, args.jmax, args.jn)
    t = np.linspace(args.tmin, args.tmax, args.tn)
    try:
        columns = _analytic_columns(args.quantity, j, t, gamma, epsilon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = _out_dir(args)
    manifest = output.ManifestWriter(
        out, "analytic",
        {"quantity": args.quantity, "gamma": gamma, "epsilon": epsilon,
         "jmin": args.jmin, "jmax": args.jmax, "jn": args.jn,
         "tmin": args.tmin, "tmax": args.tmax, "tn": args.tn},
    )
    path = out / f"analytic_{args.quantity.replace('-', '_')}.csv"
    rows = output.write_analytic_csv(path, j, t, columns)
    manifest.add(path, rows)
    manifest.write()
    return 0


def cmd_estimator_grid(args) -> int:
    mapping = _load_mapping(args)
    # separability needs a classifiable ensemble, so keep the default length
    cfg = _sim_config(args, mapping, n_traj=1000)
    taus = mapping.get("tau_list", (TAU_TRACKS_WINDOW,))
    etas = mapping.get("eta_list", (cfg.eta,))
    threshold = mapping.get("concurrence_threshold", 0.8)
    points = mapping.get("grid_points", 26)
    span = mapping.get("grid_max", None)
    if cfg.gamma * cfg.t_max < _MIN_CLASSIFY_GAMMA_T - 1e-9:
        raise ConfigError(
            "estimator-grid classifies by final concurrence; need "
            f"Gamma*t_max >= {_MIN_CLASSIFY_GAMMA_T:g}"
        )
    out = _out_dir(args)
    manifest = output.ManifestWriter(
        out, "estimator-grid", cfg,
        extra={"tau_list": list(taus), "eta_list": list(etas),
               "concurrence_threshold": threshold, "crossings": []},
    )
    for eta in etas:
        run_cfg = replace(cfg, eta=float(eta))
        axis = estimator.default_axis(run_cfg, points=points, span=span)
        result = estimator.scan_rates(
            run_cfg, taus, t_i_values=axis, delta_t_values=axis,
            threshold=threshold,
        )
        for tau, grid in zip(taus, result.grids):
            token = tau if isinstance(tau, str) else f"{tau:g}"
            path = out / f"rate_grid_tau_{token}_eta_{eta:g}.csv"
            rows = output.write_rate_grid_csv(path, grid)
            manifest.add(path, rows)
            crossing = estimator.sustained_crossing(
                grid, delta_t=0.3 / run_cfg.gamma
            )
            manifest.extra["crossings"].append(
                {"tau": token, "eta": float(eta), "t_i": None
                 if np.isnan(crossing) else crossing}
            )
            print(f"tau={token} eta={eta:g}: 50% sustained crossing at "
                  f"t_i={crossing:g}")
    manifest.write()
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="halfparity", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a trajectory ensemble")
    _add_common_flags(p)
    p.add_argument("--save-traj", type=int, default=10,
                   help="trajectories written to trajectories.csv (default 10)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("analytic", help="tabulate a closed-form quantity")
    p.add_argument("--quantity", required=True,
                   choices=sorted(_ANALYTIC_QUANTITIES) + ["bounds"])
    p.add_argument("--gamma", type=float, help="measurement rate (default 1)")
    p.add_argument("--epsilon", type=float, help="level splitting (default 1)")
    p.add_argument("--jmin", type=float, default=-1.5)
    p.add_argument("--jmax", type=float, default=1.5)
    p.add_argument("--jn", type=int, default=61, help="number of J points")
    p.add_argument("--tmin", type=float, default=None,
                   help="first time (default 0; pdf requires > 0)")
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--tn", type=int, default=101, help="number of times")
    p.add_argument("--out", type=Path, default=Path("."))
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("estimator-grid",
                       help="success/error rates of the single-shot estimator")
    _add_common_flags(p)
    p.set_defaults(func=cmd_estimator_grid)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"output failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
