"""Backend benchmark: compiled kernel vs pure-Python reference.

Run as `python -m halfparity.benchmark`. Both backends integrate the same
pre-generated noise, so the comparison is arithmetic-for-arithmetic.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .engine import _reference, wiener_increments
from .states import initial_state

try:
    from .engine import _kernel
except ImportError:  # pragma: no cover - depends on the build environment
    _kernel = None


def _time_paths(module, kind, dw_list, gamma, epsilon, eta, dt):
    n = dw_list[0].shape[0]
    store = np.array([0, n], dtype=np.int64)
    pops = np.empty((n + 1, 4))
    rec = np.empty(n)
    elapsed = 0.0
    for dw in dw_list:
        if kind == "pure":
            psi0 = initial_state()
            states = np.empty((2, 4), dtype=complex)
            conc = np.empty(n + 1)
            t0 = time.perf_counter()
            status = module.sse_path(
                psi0, dw, gamma, epsilon, dt, store, states, pops, rec, conc
            )
            elapsed += time.perf_counter() - t0
        else:
            psi0 = initial_state()
            rho0 = np.outer(psi0, psi0.conj())
            states = np.empty((2, 4, 4), dtype=complex)
            t0 = time.perf_counter()
            status = module.sme_path(
                rho0, dw, gamma, epsilon, eta, dt, store, states, pops, rec
            )
            elapsed += time.perf_counter() - t0
        if status != -1:
            raise RuntimeError(f"divergence at step {status} during benchmark")
    return elapsed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="python -m halfparity.benchmark", description=__doc__
    )
    parser.add_argument("--steps", type=int, default=10000)
    parser.add_argument("--paths", type=int, default=8)
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--epsilon", type=float, default=1.0)
    parser.add_argument("--eta", type=float, default=0.5,
                        help="efficiency for the density-matrix benchmark")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    dt = 1e-3 / args.gamma
    dw_list = [
        wiener_increments(args.seed, i, args.steps, dt) for i in range(args.paths)
    ]
    steps_total = args.steps * args.paths

    backends = [("python", _reference)]
    if _kernel is not None:
        backends.append(("compiled", _kernel))
    else:
        print("compiled kernel not available; timing the reference only")

    results = {}
    for kind in ("pure", "mixed"):
        eta = 1.0 if kind == "pure" else args.eta
        for name, module in backends:
            elapsed = _time_paths(
                module, kind, dw_list, args.gamma, args.epsilon, eta, dt
            )
            results[kind, name] = elapsed
            print(
                f"{kind:5s} {name:8s} {elapsed * 1e3:9.1f} ms "
                f"({steps_total / elapsed:12.0f} steps/s)"
            )
        if _kernel is not None:
            ratio = results[kind, "python"] / results[kind, "compiled"]
            print(f"{kind:5s} speedup  {ratio:9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
