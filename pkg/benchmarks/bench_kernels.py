"""Compare the compiled and pure-Python kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from natlift import base, curvature, kernels, lift
from natlift.connection import connection_at
from natlift.lift import TangentPoint


def family_inputs(n, rng):
    arrays = [rng.standard_normal((n, n, n)) for _ in range(6)]
    arrays += [rng.standard_normal((n, n, n, n)) for _ in range(10)]
    arrays += [rng.standard_normal((n, n, n, n)), rng.standard_normal((n, n, n))]
    return arrays


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    rng = np.random.default_rng(0)
    model = base.Sphere(1.0)
    params = lift.cheeger_gromoll()
    pt = TangentPoint([1.2, 0.4], [0.3, -0.7])
    geom = model.geometry_at(pt.x)
    connection_at(lift.evaluate(params, geom, pt.y))  # warm caches

    print(f"{'case':<36}" + "".join(f"{b:>14}" for b in backends))
    for n in (2, 3, 4):
        args_n = family_inputs(n, rng)
        row = []
        for b in backends:
            kernels.use_backend(b)
            row.append(min(timeit.repeat(lambda: kernels.curvature_families(*args_n),
                                         number=args.repeat, repeat=3)) / args.repeat)
        print(f"{f'curvature_families n={n}':<36}" + "".join(f"{t * 1e6:>11.1f} us" for t in row))
    row = []
    for b in backends:
        kernels.use_backend(b)
        row.append(min(timeit.repeat(lambda: curvature.curvature_components(params, geom, pt),
                                     number=args.repeat, repeat=3)) / args.repeat)
    print(f"{'curvature_components CG sphere':<36}" + "".join(f"{t * 1e6:>11.1f} us" for t in row))
    if len(backends) == 1:
        print("compiled extension not built; only the Python backend was timed")


if __name__ == "__main__":
    main()
