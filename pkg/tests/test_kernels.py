"""Numba and numpy backends must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from maxcoupling import _accel, _kernels, discretize_uniform
from maxcoupling.simulate import stopping_thresholds

numba_only = pytest.mark.skipif(not _accel.NUMBA_AVAILABLE, reason="numba not installed")


@numba_only
@pytest.mark.parametrize("seed", [0, 7, 2**63 + 5])
def test_walk_parity(seed):
    thr, lo = stopping_thresholds(discretize_uniform(-1, 1, 20), 0.05)
    a = _kernels.walk_numpy(thr, lo, seed, 3000, 50_000)
    b = _kernels.walk_numba(thr, lo, np.uint64(seed), 3000, 50_000)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


@numba_only
def test_walk_parity_with_truncation():
    thr, lo = stopping_thresholds(discretize_uniform(-1, 1, 20), 0.01)
    a = _kernels.walk_numpy(thr, lo, 3, 500, 200)
    b = _kernels.walk_numba(thr, lo, 3, 500, 200)
    assert not a[2].all()
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_walk_prefix_independent_of_batch_size():
    thr, lo = stopping_thresholds(discretize_uniform(-1, 1, 10), 0.1)
    small = _kernels.walk(thr, lo, 9, 100, 10_000)
    large = _kernels.walk(thr, lo, 9, 1000, 10_000)
    for x, y in zip(small, large):
        np.testing.assert_array_equal(x, y[:100])


@numba_only
def test_pivot_parity():
    rng = np.random.default_rng(0)
    T = rng.normal(size=(12, 20))
    T[3, :] = 0.0
    T[3, 5] = 2.0
    A, B = T.copy(), T.copy()
    _kernels.pivot_numpy(A, 3, 5)
    _kernels.pivot_numba(B, 3, 5)
    np.testing.assert_allclose(A, B, rtol=1e-13, atol=1e-13)
    assert A[3, 5] == 1.0 and np.all(A[np.arange(12) != 3, 5] == 0.0)


@numba_only
@pytest.mark.parametrize("k", [2, 3, 4])
def test_best_cycle_parity(k):
    rng = np.random.default_rng(k)
    for n in (2, 3, 5, 9):
        B = rng.normal(size=(n, n))
        np.fill_diagonal(B, 0.0)
        g1, c1 = _kernels.best_cycle_numpy(B, k)
        g2, c2 = _kernels._best_cycle_numba_wrapped(B, k)
        assert g1 == pytest.approx(g2, abs=1e-12)
        cyc = list(c2)
        assert g2 == pytest.approx(sum(B[cyc[t], cyc[(t + 1) % len(cyc)]] for t in range(len(cyc))), abs=1e-12)


def test_env_flag_selects_numpy():
    env = dict(os.environ, MAXCOUPLING_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from maxcoupling import _accel, _kernels; print(_accel.backend_name(), _kernels.walk.__name__)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.split() == ["numpy", "walk_numpy"]


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("MAXCOUPLING_THREADS", "1")
    assert _accel.thread_cap() == 1
    _accel.apply_thread_cap()
    monkeypatch.setenv("MAXCOUPLING_THREADS", "zero")
    assert _accel.thread_cap() is None
