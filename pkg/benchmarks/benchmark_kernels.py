"""Benchmark the accelerated kernels against the pure-numpy fallback.

Runs the same workload twice in subprocesses, once with numba enabled and
once with CONEDEMIX_NO_NUMBA=1, and prints a timing table.

Usage: python3 benchmarks/benchmark_kernels.py
"""

import json
import os
import subprocess
import sys

_WORKLOAD = r"""
import json
import time
import numpy as np
from conedemix import kernels
from conedemix.cones import mc_intrinsic_volumes, orthant_cone
from conedemix.numerics import RngState
from conedemix.random_models import haar_orthogonal, sparse_signal
from conedemix.solvers import DemixProblem, GaugeSpec, solve_demix

def timed(fn, repeat=3):
    fn()  # warm-up (includes JIT compilation when enabled)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best

results = {"numba": kernels.USE_NUMBA}

rng = RngState(0)
d = 100
Q = haar_orthogonal(d, rng.child("Q"))
m0 = rng.child("m").generator().choice([-1.0, 1.0], size=d)
c0 = sparse_signal(d, 15, rng.child("c"))
z0 = Q @ m0 + c0
p = DemixProblem(z0, Q, GaugeSpec("l1", d), GaugeSpec("linf", d), 1.0)
results["dr_channel_d100"] = timed(lambda: solve_demix(p))

K = orthant_cone(8)
results["mc_volumes_d8_20k"] = timed(
    lambda: mc_intrinsic_volumes(K, 20000, rng.child("mc")))

gen = rng.child("nnls").generator()
A = np.ascontiguousarray(gen.standard_normal((256, 64)))
b = np.ascontiguousarray(gen.standard_normal(256))
results["nnls_256x64_x100"] = timed(
    lambda: [kernels.nnls(A, b, 5000) for _ in range(100)])

gen2 = rng.child("lp").generator()
c = np.ascontiguousarray(gen2.standard_normal(20))
Al = np.ascontiguousarray(gen2.standard_normal((60, 20)))
bl = np.ascontiguousarray(np.abs(gen2.standard_normal(60)) + 0.5)
results["simplex_60x20_x50"] = timed(
    lambda: [kernels.simplex_standard(c, Al, bl, 5000) for _ in range(50)])

print(json.dumps(results))
"""


def run(no_numba: bool) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["CONEDEMIX_NO_NUMBA"] = "1"
    else:
        env.pop("CONEDEMIX_NO_NUMBA", None)
    res = subprocess.run([sys.executable, "-c", _WORKLOAD], env=env,
                         capture_output=True, text=True)
    if res.returncode != 0:
        raise RuntimeError(res.stderr)
    return json.loads(res.stdout)


def main() -> None:
    fast = run(no_numba=False)
    slow = run(no_numba=True)
    assert fast.pop("numba") and not slow.pop("numba")
    width = max(len(k) for k in fast)
    print(f"{'benchmark':<{width}}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for key in fast:
        ratio = slow[key] / fast[key]
        print(f"{key:<{width}}  {fast[key]:>9.4f}s  {slow[key]:>9.4f}s  {ratio:>7.1f}x")


if __name__ == "__main__":
    main()
