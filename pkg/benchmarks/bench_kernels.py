"""Time the numba and numpy implementations of the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from ptcavity.kernels import backends


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--steps", type=int, default=200_000, help="RK4 steps")
    parser.add_argument("--n-out", type=int, default=256, help="quadrature output points")
    parser.add_argument("--n-in", type=int, default=2 ** 14, help="quadrature input points")
    args = parser.parse_args(argv)

    y0 = np.array([0.0, 0.0, 5026.5, 1.989e-4, 0.0])
    m, omega, delta = 1.0173e-4, 0.45103, -3.797
    dt = 1e-3 / omega
    rng = np.random.default_rng(0)
    eta = np.linspace(-400.0, 400.0, args.n_in)
    alpha = 1j * rng.standard_normal(args.n_out)
    z = rng.standard_normal(args.n_out) * 0.01 + 0j
    logw = -(eta / 100.0) ** 2 + 0j
    zeta = eta + 0j

    results = {}
    for name, (rk4, bsum) in backends().items():
        # first call compiles under numba; keep it out of the timing
        rk4(y0, 10, dt, m, omega, delta, 1)
        bsum(alpha[:2], z[:2], logw[:8], zeta[:8], 1j)
        t_rk = _best(lambda: rk4(y0, args.steps, dt, m, omega, delta, 100), args.repeat)
        t_q = _best(lambda: bsum(alpha, z, logw, zeta, 1j), args.repeat)
        results[name] = (t_rk, t_q)

    print(f"{'backend':<8} {'rk4 [s]':>10} {'quadrature [s]':>15}")
    for name, (t_rk, t_q) in results.items():
        print(f"{name:<8} {t_rk:>10.4f} {t_q:>15.4f}")
    if len(results) == 2:
        (r1, q1), (r2, q2) = results["numpy"], results["numba"]
        print(f"speedup  {r1 / r2:>10.1f}x {q1 / q2:>14.1f}x")


if __name__ == "__main__":
    main()
