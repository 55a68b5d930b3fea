"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--repeat 3] [--paths 20000]

Each row reports the best wall time over ``--repeat`` runs after one warm-up
call (which absorbs numba compilation) and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from maxcoupling import _accel, _kernels, ay_example, build_lp, default_y_grid, discretize_uniform
from maxcoupling.lp import _tableau
from maxcoupling.simulate import stopping_thresholds


def best_of(fn, repeat):
    fn()
    best = np.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bench_walk(paths, repeat):
    thr, lo = stopping_thresholds(discretize_uniform(-1, 1, 50), 0.02)
    args = (thr, lo, 1, paths, 1_000_000)
    same = all(np.array_equal(a, b) for a, b in zip(_kernels.walk_numpy(*args), _kernels._walk_numba_wrapped(*args)))
    return (
        f"walk ({paths} paths, h=0.02)",
        best_of(lambda: _kernels.walk_numpy(*args), repeat),
        best_of(lambda: _kernels._walk_numba_wrapped(*args), repeat),
        same,
    )


def bench_pivot(repeat, n_pivots=200):
    mu = discretize_uniform(-1, 1, 50)
    F = ay_example()
    lp = build_lp(mu, default_y_grid(mu, F, refine=101), F)
    T0, _, _ = _tableau(lp)
    rng = np.random.default_rng(0)
    cols = rng.integers(0, lp.n_vars, n_pivots)
    rows = rng.integers(0, T0.shape[0] - 1, n_pivots)
    T0[rows, cols] += 1.0  # keep pivots nonzero

    def run(kernel):
        T = T0.copy()
        for r, c in zip(rows, cols):
            if T[r, c] != 0.0:
                kernel(T, int(r), int(c))
        return T

    a, b = run(_kernels.pivot_numpy), run(_kernels.pivot_numba)
    same = np.allclose(a, b, rtol=1e-9, atol=1e-9, equal_nan=True)
    return (
        f"pivot ({n_pivots} on {T0.shape[0]}x{T0.shape[1]})",
        best_of(lambda: run(_kernels.pivot_numpy), repeat),
        best_of(lambda: run(_kernels.pivot_numba), repeat),
        same,
    )


def bench_cycle(repeat, n=40, k=3):
    rng = np.random.default_rng(1)
    B = rng.normal(size=(n, n))
    np.fill_diagonal(B, 0.0)
    g1, _ = _kernels.best_cycle_numpy(B, k)
    g2, _ = _kernels._best_cycle_numba_wrapped(B, k)
    return (
        f"best_cycle (n={n}, length<={k})",
        best_of(lambda: _kernels.best_cycle_numpy(B, k), repeat),
        best_of(lambda: _kernels._best_cycle_numba_wrapped(B, k), repeat),
        abs(g1 - g2) <= 1e-12,
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--paths", type=int, default=20_000)
    args = ap.parse_args(argv)
    if not _accel.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")
    _accel.apply_thread_cap()

    rows = [bench_walk(args.paths, args.repeat), bench_pivot(args.repeat), bench_cycle(args.repeat)]
    print(f"{'kernel':40s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}  agree")
    for name, t_np, t_nb, same in rows:
        print(f"{name:40s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x  {same}")


if __name__ == "__main__":
    main()
