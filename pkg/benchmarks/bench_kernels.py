"""Numba vs numpy timings for each hot kernel, plus a full simulation run.

    python benchmarks/bench_kernels.py [--repeat N]

Kernels are timed in-process (numba compiled once before timing). The full
run is timed in fresh interpreters with and without AEROCAST_NO_NUMBA so the
backend is picked the same way the package picks it.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from aerocast.kernels import _numba, _numpy


def cases(rng):
    centers = rng.uniform(-1000, 1000, (200, 3))
    radii = rng.uniform(100, 600, 200)
    pts = rng.uniform(-1000, 1000, (60, 3))
    path = rng.uniform(-1000, 1000, (200_000, 3))
    dist = np.abs(rng.normal(400, 200, (200_000, 8)))
    rate, size, chan = 2_176_000.0, 8000.0, 54e6
    emit = np.cumsum(np.full(54_400, size / rate))
    parent = np.array([-1, 0, 0, 1, 2], dtype=np.int64)
    n_steps = int(26.0 / 1e-3)
    out = _numpy.fifo_tree_transmit(emit, parent, size / chan, 2e-3, 1e-3, 64, n_steps)
    serving = rng.uniform(size=(n_steps, 5)) < 0.9
    return {
        "segment_sphere_roots": lambda k: k.segment_sphere_roots((0, 0, 0), (900, 300, 10), centers, radii),
        "pairwise_distances": lambda k: k.pairwise_distances(pts),
        "distance_matrix": lambda k: k.distance_matrix(path, centers[:8]),
        "sticky_attachment": lambda k: k.sticky_attachment(dist, 560.0, 0),
        "fifo_tree_transmit": lambda k: k.fifo_tree_transmit(emit, parent, size / chan, 2e-3, 1e-3, 64, n_steps),
        "first_served_delivery": lambda k: k.first_served_delivery(out, serving, 1e-3),
    }


_RUN = (
    "import time; from aerocast.simulator import run, Policy; from aerocast.scenarios import small_group; "
    "sc = small_group(Policy.ETTA, 2176000.0); run(sc); t = time.perf_counter(); run(sc); "
    "print(time.perf_counter() - t)"
)


def full_run(no_numba):
    env = dict(os.environ)
    env.pop("AEROCAST_NO_NUMBA", None)
    if no_numba:
        env["AEROCAST_NO_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", _RUN], env=env, capture_output=True, text=True, check=True)
    return float(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    table = cases(np.random.default_rng(0))
    print(f"{'kernel':<24}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, call in table.items():
        call(_numba)  # compile
        fast = min(timeit.repeat(lambda: call(_numba), number=1, repeat=args.repeat)) * 1e3
        slow = min(timeit.repeat(lambda: call(_numpy), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<24}{fast:>12.3f}{slow:>12.3f}{slow / fast:>10.2f}")
    fast, slow = full_run(False) * 1e3, full_run(True) * 1e3
    print(f"{'small_group etta 2.176M':<24}{fast:>12.1f}{slow:>12.1f}{slow / fast:>10.2f}")


if __name__ == "__main__":
    main()
