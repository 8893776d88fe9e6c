"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 200] [--k 30]

Prints one line per kernel with the best-of-``repeat`` time for each backend
and the speed-up.  Also times one full OP3D plan under each backend in a
subprocess, since the backend is fixed at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from obliqueplan import _kernels


def cases(k: int, rng):
    pts = rng.uniform(0, 300, (k + 2, 3))
    hk = min(k, 11)
    D = rng.uniform(1, 300, (hk, hk))
    D = D + D.T
    to_end = rng.uniform(1, 300, hk)
    full = rng.uniform(1, 300, (k + 2, k + 2))
    full = full + full.T
    order = list(rng.permutation(k))
    l = rng.normal(0, 20, (k, 2))
    z = rng.uniform(60, 120, k)
    r2 = np.full(k, 400.0)
    lr = rng.uniform(-10, -8, k)
    b1, b2 = 4.487179487179488, 2.9787234042553195
    return {
        "chain_length": (pts,),
        "smoothed_chain": (pts, 1e-6),
        f"held_karp_table (K={hk})": (D, to_end),
        "two_opt": (order, full),
        "altitude_constraints": (z, z + 2.0, np.sum(l * l, axis=1), r2, lr, b1, b2, 1e-8),
        "horizontal_constraints": (l, z, l + 1.0, r2, lr, b1, b2, 1e-8, 1e-9),
    }


def time_call(fn, args, repeat: int) -> float:
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def time_plan(pure: bool) -> float:
    code = (
        "import time; from obliqueplan.scenario_io import generate; from obliqueplan.planner import plan;"
        "scn = generate(0, k=5); t = time.perf_counter(); plan(scn); print(time.perf_counter() - t)"
    )
    env = dict(os.environ, OBLIQUEPLAN_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=200)
    p.add_argument("--k", type=int, default=30, help="waypoints per kernel call")
    p.add_argument("--no-plan", action="store_true", help="skip the end-to-end plan timing")
    args = p.parse_args(argv)

    py, cy = _kernels.python_backend, _kernels.compiled_backend
    if cy is None:
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'numpy (us)':>12s} {'cython (us)':>12s} {'speed-up':>9s}")
    for name, call_args in cases(args.k, rng).items():
        fname = name.split()[0]
        t_py = time_call(getattr(py, fname), call_args, args.repeat) * 1e6
        t_cy = time_call(getattr(cy, fname), call_args, args.repeat) * 1e6
        print(f"{name:32s} {t_py:12.1f} {t_cy:12.1f} {t_py / t_cy:8.1f}x")
    if not args.no_plan:
        t_py, t_cy = time_plan(True), time_plan(False)
        print(f"{'plan (K=5, seed 0)':32s} {t_py * 1e6:12.0f} {t_cy * 1e6:12.0f} {t_py / t_cy:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
