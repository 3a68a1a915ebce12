"""Time the numba and numpy kernel backends side by side.

    python3 benchmarks/bench_kernels.py [--repeat 7]

Both backends are imported in one process (``_kernels.numpy_impl`` and
``_kernels.numba_impl``), so this needs the numba backend enabled. The numba
kernels are warmed up once before timing so compilation is not counted.
"""

import argparse
import math
import timeit

import numpy as np

from tubeorbit import _kernels
from tubeorbit.trajectory import basis_tables, random_trajectory


def cases(modes):
    tr = random_trajectory(modes, 0.2, 1, 2 * math.pi, 1)
    t, w, S, C = basis_tables(tr.omega, modes, 8 * modes)
    da = 1e-4 * np.ones(modes)
    db = -1e-4 * np.ones(modes)
    s0 = np.array([0.0, 0.0, 0.3, 1.1])
    return {
        f"action_grad  N={modes:<3d}": lambda impl: impl.action_grad(
            S, C, w, t, tr.a, tr.b, tr.omega, 1.0, 1.0, 1.0, 1.0),
        f"action_delta N={modes:<3d}": lambda impl: impl.action_delta(
            S, C, w, t, tr.a, tr.b, da, db, tr.omega, 1.0, 1.0, 1.0, 1.0),
    }, s0


def bench(fn, impl, repeat):
    fn(impl)
    number = 1
    while timeit.timeit(lambda: fn(impl), number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(lambda: fn(impl), number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    if _kernels.numba_impl is None:
        raise SystemExit("numba backend disabled (unset TUBEORBIT_NUMBA=0 to benchmark it)")

    table = {}
    for modes in (16, 32, 64):
        funcs, s0 = cases(modes)
        table.update(funcs)
    table["rk4_path     16384"] = lambda impl: impl.rk4_path(s0, 2 * math.pi / 16384, 16384,
                                                             1.0, 1.0, 1.0)

    print(f"{'kernel':<20s} {'numpy':>12s} {'numba':>12s} {'speedup':>8s}")
    for name, fn in table.items():
        t_np = bench(fn, _kernels.numpy_impl, args.repeat)
        t_nb = bench(fn, _kernels.numba_impl, args.repeat)
        print(f"{name:<20s} {t_np * 1e6:10.1f}us {t_nb * 1e6:10.1f}us {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
