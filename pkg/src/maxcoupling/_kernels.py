"""Hot loops with a numba implementation and a pure-numpy twin.

The public names at the bottom (``pivot``, ``best_cycle``, ``walk``) are
bound to one backend at import time according to ``_accel.USE_NUMBA``. Both
backends are always importable (``*_numpy`` always, ``*_numba`` when numba
is installed) so tests and benchmarks can compare them directly.
"""

from __future__ import annotations

import numpy as np

from . import _accel

# splitmix64 constants
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30, _S27, _S31 = np.uint64(30), np.uint64(27), np.uint64(31)
_ONE = np.uint64(1)


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------


def _splitmix_np(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def path_keys_numpy(seed: int, paths: np.ndarray) -> np.ndarray:
    s = _splitmix_np(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    return _splitmix_np(s ^ _splitmix_np(paths.astype(np.uint64)))


def pivot_numpy(T: np.ndarray, r: int, c: int) -> None:
    """Gauss-Jordan pivot of tableau ``T`` on entry (r, c), in place."""
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    nz = np.flatnonzero(col)
    if nz.size:
        T[nz] -= np.outer(col[nz], T[r])
    T[nz, c] = 0.0


def best_cycle_numpy(B: np.ndarray, max_cycle: int):
    """Largest sum of B over a cycle of distinct indices (length 2..max_cycle).

    ``B[i, j]`` is the payoff change from moving x_i onto y_j. Returns
    ``(gain, cycle)``; cycles are reported starting at their smallest index.
    """
    n = B.shape[0]
    best, arg = -np.inf, ()
    idx = np.arange(n)
    G2 = B + B.T
    iu = np.triu_indices(n, 1)
    if iu[0].size:
        k = int(np.argmax(G2[iu]))
        best, arg = float(G2[iu][k]), (int(iu[0][k]), int(iu[1][k]))
    if max_cycle >= 3:
        for i in range(n - 2):
            # T[j, l] = B[i, j] + B[j, l] + B[l, i] over j, l > i, j != l
            T = B[i, :, None] + B + B[None, :, i]
            mask = (idx[:, None] > i) & (idx[None, :] > i) & (idx[:, None] != idx[None, :])
            T = np.where(mask, T, -np.inf)
            k = int(np.argmax(T))
            if T.flat[k] > best:
                best, arg = float(T.flat[k]), (i, k // n, k % n)
    if max_cycle >= 4:
        for i in range(n - 3):
            for j in range(i + 1, n):
                T = B[i, j] + B[j, :, None] + B + B[None, :, i]
                ok = idx > i
                ok[j] = False
                mask = ok[:, None] & ok[None, :] & (idx[:, None] != idx[None, :])
                T = np.where(mask, T, -np.inf)
                k = int(np.argmax(T))
                if T.flat[k] > best:
                    best, arg = float(T.flat[k]), (i, j, k // n, k % n)
    return best, arg


def walk_numpy(thresholds: np.ndarray, lo: int, seed: int, n_paths: int, max_steps: int):
    """Simple ±1 walks from 0, each stopped once its running max S reaches
    ``thresholds[W - lo]`` (or W leaves the table). See :func:`walk_numba`."""
    hi = lo + thresholds.size - 1
    W = np.zeros(n_paths, dtype=np.int64)
    S = np.zeros(n_paths, dtype=np.int64)
    steps = np.zeros(n_paths, dtype=np.int64)
    stopped = np.zeros(n_paths, dtype=np.bool_)

    def check(ix):
        w = W[ix]
        out = (w < lo) | (w > hi)
        inside = ~out
        out[inside] = S[ix][inside] >= thresholds[w[inside] - lo]
        return out

    active = np.arange(n_paths)
    done = check(active)
    stopped[active[done]] = True
    active = active[~done]
    keys = path_keys_numpy(seed, active)
    word = np.zeros(active.size, dtype=np.uint64)
    t = 0
    while active.size and t < max_steps:
        bit = t & 63
        if bit == 0:
            word = _splitmix_np(keys + np.uint64(t >> 6))
        up = ((word >> np.uint64(bit)) & _ONE).astype(np.int64)
        W[active] += 2 * up - 1
        S[active] = np.maximum(S[active], W[active])
        t += 1
        done = check(active)
        if done.any():
            hit = active[done]
            stopped[hit] = True
            steps[hit] = t
            keep = ~done
            active, keys, word = active[keep], keys[keep], word[keep]
    steps[active] = t
    return W, S, stopped, steps


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

if _accel.NUMBA_AVAILABLE:
    from numba import njit, prange

    @njit(cache=True)
    def _splitmix_nb(z):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))

    @njit(cache=True)
    def pivot_numba(T, r, c):
        rows, cols = T.shape
        inv = 1.0 / T[r, c]
        for k in range(cols):
            T[r, k] *= inv
        T[r, c] = 1.0
        for i in range(rows):
            if i == r:
                continue
            f = T[i, c]
            if f == 0.0:
                continue
            for k in range(cols):
                T[i, k] -= f * T[r, k]
            T[i, c] = 0.0

    @njit(cache=True)
    def best_cycle_numba(B, max_cycle):
        n = B.shape[0]
        best = -np.inf
        arg = np.full(4, -1, dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                g = B[i, j] + B[j, i]
                if g > best:
                    best = g
                    arg[:] = -1
                    arg[0], arg[1] = i, j
        if max_cycle >= 3:
            for i in range(n):
                for j in range(i + 1, n):
                    bij = B[i, j]
                    for l in range(i + 1, n):
                        if l == j:
                            continue
                        g = bij + B[j, l] + B[l, i]
                        if g > best:
                            best = g
                            arg[:] = -1
                            arg[0], arg[1], arg[2] = i, j, l
        if max_cycle >= 4:
            for i in range(n):
                for j in range(i + 1, n):
                    bij = B[i, j]
                    for l in range(i + 1, n):
                        if l == j:
                            continue
                        bijl = bij + B[j, l]
                        for q in range(i + 1, n):
                            if q == j or q == l:
                                continue
                            g = bijl + B[l, q] + B[q, i]
                            if g > best:
                                best = g
                                arg[0], arg[1], arg[2], arg[3] = i, j, l, q
        return best, arg

    @njit(cache=True, parallel=True)
    def walk_numba(thresholds, lo, seed, n_paths, max_steps):
        """Per path p: W, S start at 0; at step t the direction is bit t%64 of
        splitmix64(key_p + t//64); stop when S >= thresholds[W - lo]."""
        hi = lo + thresholds.shape[0] - 1
        W = np.zeros(n_paths, dtype=np.int64)
        S = np.zeros(n_paths, dtype=np.int64)
        steps = np.zeros(n_paths, dtype=np.int64)
        stopped = np.zeros(n_paths, dtype=np.bool_)
        s0 = _splitmix_nb(np.uint64(seed))
        for p in prange(n_paths):
            key = _splitmix_nb(s0 ^ _splitmix_nb(np.uint64(p)))
            w = 0
            s = 0
            t = 0
            done = (w < lo) or (w > hi) or (s >= thresholds[w - lo])
            word = np.uint64(0)
            while not done and t < max_steps:
                bit = t & 63
                if bit == 0:
                    word = _splitmix_nb(key + np.uint64(t >> 6))
                if (word >> np.uint64(bit)) & np.uint64(1):
                    w += 1
                    if w > s:
                        s = w
                else:
                    w -= 1
                t += 1
                if w < lo or w > hi:
                    done = True
                elif s >= thresholds[w - lo]:
                    done = True
            W[p] = w
            S[p] = s
            steps[p] = t
            stopped[p] = done
        return W, S, stopped, steps


def _best_cycle_numba_wrapped(B, max_cycle):
    g, arg = best_cycle_numba(B, max_cycle)
    return float(g), tuple(int(a) for a in arg if a >= 0)


def _walk_numba_wrapped(thresholds, lo, seed, n_paths, max_steps):
    # seeds above 2**63 do not fit numba's default int64 typing
    return walk_numba(thresholds, lo, np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF), n_paths, max_steps)


if _accel.USE_NUMBA:
    pivot = pivot_numba
    best_cycle = _best_cycle_numba_wrapped
    walk = _walk_numba_wrapped
else:
    pivot = pivot_numpy
    best_cycle = best_cycle_numpy
    walk = walk_numpy
