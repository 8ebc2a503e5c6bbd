"""Benchmark the chain integrator backends against each other.

Times run_chain on a damped kink-like initial condition for the compiled
core and the NumPy fallback, checks that the trajectories agree bitwise,
and prints the per-step throughput of each backend.

Usage:
    python3 benchmarks/bench_chain.py [--sites 2000] [--steps 20000]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from fkwaves._chain_numpy import run_chain as run_numpy

try:
    from fkwaves._chain_core import run_chain as run_compiled
except ImportError:
    run_compiled = None

MU = 1.0
SIGMA = 0.12
ALPHA = 0.05
DT = 0.01
SEED = 20240811


def make_state(n_sites: int) -> tuple[np.ndarray, np.ndarray]:
    """Two-phase state with a sharp front and small velocity noise."""
    rng = np.random.default_rng(SEED)
    u = np.where(np.arange(n_sites) < n_sites // 2, SIGMA + 1.0, SIGMA - 1.0)
    u = u + 0.01 * rng.standard_normal(n_sites)
    v = 0.01 * rng.standard_normal(n_sites)
    # frozen boundary sites, as in the production integrator protocol
    v[0] = v[-1] = 0.0
    return u, v


def run_backend(runner, n_sites: int, n_steps: int,
                repeats: int) -> tuple[float, np.ndarray, np.ndarray]:
    """Best wall time over `repeats` plus the final trajectory state."""
    best = np.inf
    u_out = v_out = None
    for _ in range(repeats):
        u, v = make_state(n_sites)
        t0 = time.perf_counter()
        runner(u, v, MU, SIGMA, ALPHA, DT, n_steps)
        best = min(best, time.perf_counter() - t0)
        u_out, v_out = u, v
    return best, u_out, v_out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, default=2000,
                    help="number of lattice sites (default 2000)")
    ap.add_argument("--steps", type=int, default=20000,
                    help="integration steps per run (default 20000)")
    ap.add_argument("--repeats", type=int, default=3,
                    help="timing repeats, best is reported (default 3)")
    args = ap.parse_args(argv)

    site_steps = args.sites * args.steps
    print(f"sites={args.sites} steps={args.steps} "
          f"(site-steps per run: {site_steps:.2e})")

    t_np, u_np, v_np = run_backend(run_numpy, args.sites, args.steps,
                                   args.repeats)
    print(f"numpy : {t_np:8.3f} s  {site_steps / t_np:.3e} site-steps/s")

    if run_compiled is None:
        print("cython: extension not built, skipping", file=sys.stderr)
        return 0

    t_cy, u_cy, v_cy = run_backend(run_compiled, args.sites, args.steps,
                                   args.repeats)
    print(f"cython: {t_cy:8.3f} s  {site_steps / t_cy:.3e} site-steps/s")
    print(f"speedup: {t_np / t_cy:.1f}x")

    if not (np.array_equal(u_np, u_cy) and np.array_equal(v_np, v_cy)):
        print("FAIL: backends disagree", file=sys.stderr)
        return 1
    print("trajectories bit-identical")
    return 0


if __name__ == "__main__":
    sys.exit(main())
