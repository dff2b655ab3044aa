"""Compare the numba and numpy kernel backends.

Kernel timings call both implementations in one process; the end-to-end
timings run ``optimize_cadf`` in a fresh interpreter per backend, selected
with ``RELAY_RATES_BACKEND``.

    python benchmarks/bench_backends.py [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from relay_rates import kernels

E2E = """
import time
from relay_rates import ChannelParams
from relay_rates.cadf import optimize_cadf
ps = [ChannelParams(m, 300.0, 10.0 / m, 0.5) for m in (1, 2, 4, 8, 16, 32, 64)]
optimize_cadf(ps[0])
t0 = time.perf_counter()
for p in ps:
    optimize_cadf(p)
print((time.perf_counter() - t0) / len(ps) * 1e3)
"""


def _cases(rng):
    M, Ps, Pr, rho = 8, 300.0, 1.25, 0.5
    a = rng.uniform(0, Ps, 2200)
    r = rng.uniform(0, Pr, 2200)
    af, bc, mac = kernels.band_terms(M, Ps, Pr, a, r)
    c1, c2 = kernels.cap(Ps), kernels.cap(M * M * Pr)
    u, v = af + bc - c1, af + mac - c2
    front = kernels.pareto_front_numpy(u, v)
    n = 40
    bps = 10 ** rng.uniform(0, 3, n)
    bpr = 10 ** rng.uniform(-1, 2, n)
    brho = rng.uniform(0.2, 2, n)
    nodes = np.linspace(0, 1, 9)
    return {
        "pareto_front": ((u, v), kernels.pareto_front_numba, kernels.pareto_front_numpy),
        "best_pair": ((u, v, front, rho * c1, c2, min(rho, 1.0)), kernels.best_pair_numba, kernels.best_pair_numpy),
        "cadf_batch": ((M, bps, bpr, brho, nodes, nodes), kernels.cadf_batch_numba, kernels.cadf_batch_numpy),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        sys.exit("numba is not installed")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<14}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, (call, fast, slow) in _cases(rng).items():
        fast(*call)  # compile
        tf = min(timeit.repeat(lambda: fast(*call), number=1, repeat=args.repeat)) * 1e3
        ts = min(timeit.repeat(lambda: slow(*call), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<14}{tf:>12.3f}{ts:>12.3f}{ts / tf:>9.1f}x")

    print()
    for backend in ("numba", "numpy"):
        env = dict(os.environ, RELAY_RATES_BACKEND=backend)
        out = subprocess.run([sys.executable, "-c", E2E], env=env, capture_output=True, text=True, check=True)
        print(f"optimize_cadf ({backend}): {float(out.stdout):.1f} ms per call")


if __name__ == "__main__":
    main()
