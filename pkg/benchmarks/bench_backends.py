"""Timing comparison of the compiled and pure-numpy kernel backends.

Run as a script:  python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from oscpulse import _purekernels

try:
    from oscpulse import _kernels
except ImportError:
    _kernels = None

PAPER = dict(nu=0.1, omega=3.0, eps=0.2, A=1.0, Omega=1.0, delta=1.0)


def timeit(fn, *args, repeat=3, **kwargs):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    h = 2.0 * np.pi / 600.0
    init = np.zeros(4)
    n_traj = 1_000_000

    Qg, Rg = np.meshgrid(np.arange(25.0, 49.01, 0.5),
                         np.arange(0.0, 64.01, 1.0), indexing="ij")
    Qf, Rf = Qg.ravel(), Rg.ravel()
    n_mono = 4000

    cases = [
        (f"coupled_rk4, {n_traj:.0e} steps", "coupled_rk4",
         (init, 0.0, h, n_traj, 100), PAPER, 3),
        (f"coupled_abm4, {n_traj:.0e} steps", "coupled_abm4",
         (init, 0.0, h, n_traj, 100), PAPER, 3),
        (f"monodromy_grid, {len(Qf)} cells x {n_mono} steps",
         "monodromy_grid", (Qf, Rf, n_mono), {}, 1),
    ]

    print(f"{'kernel':44s} {'pure [s]':>10s} {'compiled [s]':>13s} "
          f"{'speedup':>8s}")
    for label, name, args, kwargs, repeat in cases:
        t_pure = timeit(getattr(_purekernels, name), *args,
                        repeat=repeat, **kwargs)
        if _kernels is None:
            print(f"{label:44s} {t_pure:10.3f} {'n/a':>13s} {'n/a':>8s}")
            continue
        t_comp = timeit(getattr(_kernels, name), *args,
                        repeat=repeat, **kwargs)
        print(f"{label:44s} {t_pure:10.3f} {t_comp:13.3f} "
              f"{t_pure / t_comp:7.1f}x")


if __name__ == "__main__":
    main()
