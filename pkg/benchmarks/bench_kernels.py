#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times every hot kernel on representative lattice sizes plus one full RK4
step per backend.  The stepping comparison re-imports the package in a
subprocess with LPMHD_BACKEND set, since the backend is fixed at import.

    python3 benchmarks/bench_kernels.py [--sizes 64,128,256] [--repeat 200]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from lpmhd import kernels

_STEP_SNIPPET = """
import json, time
import numpy as np
from lpmhd import kernels
from lpmhd.paracalculus import random_solenoidal
from lpmhd.spectral import Grid
from lpmhd.dynamics import MHDState, rk4_step

n, repeat = {n}, {repeat}
grid = Grid(n)
rng = np.random.default_rng(0)
state = MHDState(u=random_solenoidal(grid, rng, kmax=n / 6),
                 b=random_solenoidal(grid, rng, kmax=n / 6) * 0.1)
for _ in range(3):
    state = rk4_step(state, 1e-4)
t0 = time.perf_counter()
for _ in range(repeat):
    state = rk4_step(state, 1e-4)
print(json.dumps({{"backend": kernels.BACKEND_NAME,
                   "ms_per_step": 1e3 * (time.perf_counter() - t0) / repeat}}))
"""


def time_callable(fn, args, repeat):
    fn(*args)  # warm up (and JIT-compile when applicable)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return 1e6 * (time.perf_counter() - t0) / repeat


def bench_kernels(sizes, repeat):
    rows = []
    for n in sizes:
        rng = np.random.default_rng(1)
        real = [rng.standard_normal((n, n)) for _ in range(4)]
        cplx = [rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
                for _ in range(5)]
        mult = rng.standard_normal((n, n))
        cases = {
            "advect": (real[0], real[1], real[2], real[3]),
            "leray_pair": (cplx[0], cplx[1], real[0], real[1], mult),
            "apply_multiplier": (cplx[0], mult),
            "rk4_combine": (cplx[0], cplx[1], cplx[2], cplx[3], cplx[4], 1e-3),
        }
        for name, args in cases.items():
            row = {"kernel": name, "n": n}
            for backend in kernels.available_backends():
                impl = kernels.get_backend(backend)[name]
                row[backend] = time_callable(impl, args, repeat)
            rows.append(row)
    return rows


def bench_step(n, repeat):
    rows = []
    for backend in kernels.available_backends():
        env = dict(os.environ, LPMHD_BACKEND=backend)
        out = subprocess.run(
            [sys.executable, "-c", _STEP_SNIPPET.format(n=n, repeat=repeat)],
            env=env, capture_output=True, text=True, check=True)
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="64,128,256")
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--step-repeat", type=int, default=30)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"backends: {', '.join(kernels.available_backends())} "
          f"(active: {kernels.BACKEND_NAME})\n")
    header = f"{'kernel':18s} {'n':>5s} " + "".join(
        f"{b + ' us':>12s}" for b in kernels.available_backends())
    print(header)
    print("-" * len(header))
    for row in bench_kernels(sizes, args.repeat):
        cells = "".join(f"{row[b]:12.1f}" for b in kernels.available_backends())
        print(f"{row['kernel']:18s} {row['n']:5d} {cells}")

    print(f"\nfull RK4 step, n = {sizes[-1]}:")
    for row in bench_step(sizes[-1], args.step_repeat):
        print(f"  {row['backend']:8s} {row['ms_per_step']:.2f} ms/step")


if __name__ == "__main__":
    main()
