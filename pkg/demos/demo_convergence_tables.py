"""Desk-scale reproduction of the benchmark convergence tables.

Runs reduced refinement ladders (the acceptance suite runs the full ones)
and prints errors with observed orders.  Expected behaviour: order 1 + alpha
in time, so 2.0 for the smooth kernel and 1.5 for the weakly singular one,
and order 1 in space for the gradient-sampled error.
"""

import time

import numpy as np

from memwave import KernelSpec
from memwave.cli import RunConfig, run_convergence

ROOT3 = np.sqrt(3.0)


def show(rows, label, predicted):
    print(f"\n{label}  (predicted order {predicted})")
    print(f"{'M':>6} {'N':>6} {'E':>14} {'CR':>8}")
    for m, n, err, cr in rows:
        cr_text = "*" if cr is None else f"{cr:.3f}"
        print(f"{m:6d} {n:6d} {err:14.5e} {cr_text:>8}")


start = time.time()

config = RunConfig(preset="benchmark_1d", dim=1, m=32, n=32, t_final=1.0,
                   kernel=KernelSpec(1.0, 1.1, 0.5), damping=None)
show(run_convergence(config, "time", [8, 16, 32, 64]),
     "time refinement, smooth kernel (sigma=1.1, gamma=0.5, M=32)", "2.0")

config = RunConfig(preset="benchmark_1d", dim=1, m=32, n=32, t_final=1.0,
                   kernel=KernelSpec(0.5, 2.0, 1.0), damping=None)
show(run_convergence(config, "time", [64, 128, 256]),
     "time refinement, singular kernel (sigma=2, gamma=1, M=32)", "1.5")

config = RunConfig(preset="benchmark_1d", dim=1, m=32, n=32, t_final=1.0,
                   kernel=KernelSpec(0.5, 3.0, 3.0 * ROOT3), damping=None)
show(run_convergence(config, "space", [32, 64, 128]),
     "space refinement, singular kernel (sigma=3, gamma=3*sqrt(3), N=32)", "1.0")

config = RunConfig(preset="benchmark_2d", dim=2, m=64, n=16, t_final=0.5,
                   kernel=KernelSpec(1.0, 2.0, 2.0), damping=None)
show(run_convergence(config, "space", [32, 64, 128]),
     "space refinement, two dimensions (sigma=2, gamma=2, N=16, T=1/2)", "1.0")

print(f"\ntotal {time.time() - start:.1f}s")
