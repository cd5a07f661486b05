"""Time the compiled tube kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--nodes M]
"""
import argparse
import timeit

import numpy as np

from lw6 import flux
from lw6.kernels import available_backends
from lw6.quadrature import SphereQuadrature
from lw6.worldline import builtin_worldline


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--nodes", type=int, default=8, help="Gauss nodes per angle")
    args = p.parse_args(argv)

    q = SphereQuadrature.uniform(args.nodes)
    state = builtin_worldline("helical", radius=1.0, beta=0.5, drift=0.3).state(0.4)
    backends = available_backends()
    print(f"{len(q.weights)} sphere nodes, backends: {', '.join(backends)}")

    results = {}
    for backend in backends:
        call = lambda: flux.tube_rate(state, 1.0, q, backend=backend)  # noqa: E731
        number, _ = timeit.Timer(call).autorange()
        best = min(timeit.repeat(call, number=number, repeat=args.repeat)) / number
        results[backend] = (best, call())
        print(f"{backend:>8}: {best * 1e3:9.3f} ms per tube_rate call")

    if len(results) == 2:
        (tc, (mc, ac)), (tp, (mp, ap)) = results["cython"], results["python"]
        diff = max(np.abs(mc - mp).max() / np.abs(mp).max(), np.abs(ac - ap).max() / np.abs(ap).max())
        print(f" speedup: {tp / tc:.1f}x, max relative difference {diff:.1e}")


if __name__ == "__main__":
    main()
