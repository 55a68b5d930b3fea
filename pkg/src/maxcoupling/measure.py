"""Discrete probability measures on the real line.

Everything in the package works with finitely supported measures; atomless
statements are approached by refining :func:`discretize_uniform`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BadInterval, EmptyMeasure, NonConvexQuotes, NonFinite, TooFewQuotes

DEFAULT_MEAN_TOL = 1e-9
QUOTE_TOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Sorted weighted atoms ``x`` (strictly increasing) with weights ``p`` summing to one.

    Construct through :func:`build_measure`, which merges duplicates and
    normalizes. Direct construction assumes the arrays are already clean.
    """

    x: np.ndarray
    p: np.ndarray
    mean_tolerance: float = DEFAULT_MEAN_TOL
    mean: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "x", _readonly(self.x))
        object.__setattr__(self, "p", _readonly(self.p))
        object.__setattr__(self, "mean", float(np.dot(self.x, self.p)))

    @property
    def centered(self) -> bool:
        return abs(self.mean) <= self.mean_tolerance

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return list(zip(self.x.tolist(), self.p.tolist()))

    @property
    def n_atoms(self) -> int:
        return int(self.x.size)

    def std(self) -> float:
        return float(np.sqrt(np.dot((self.x - self.mean) ** 2, self.p)))

    def cdf(self, t) -> np.ndarray:
        """P(X <= t), vectorized over ``t``."""
        cum = np.cumsum(self.p)
        idx = np.searchsorted(self.x, np.asarray(t, dtype=float), side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)

    def __len__(self) -> int:
        return self.n_atoms

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return (
            np.array_equal(self.x, other.x)
            and np.array_equal(self.p, other.p)
            and self.mean_tolerance == other.mean_tolerance
        )

    def __repr__(self) -> str:
        return f"DiscreteMeasure(n_atoms={self.n_atoms}, mean={self.mean:.3g}, centered={self.centered})"


def build_measure(
    pairs: Iterable[tuple[float, float]], mean_tolerance: float = DEFAULT_MEAN_TOL
) -> DiscreteMeasure:
    """Build a measure from ``(position, weight)`` pairs.

    Exactly equal positions are merged, zero weights dropped, and the
    result renormalized to total mass one.
    """
    arr = np.asarray(list(pairs), dtype=np.float64)
    if arr.size == 0:
        raise EmptyMeasure("no atoms given")
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise NonFinite("positions and weights must be finite reals")
    x, w = arr[:, 0], arr[:, 1]
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    keep = w > 0
    if not np.any(keep):
        raise EmptyMeasure("no atom carries positive weight")
    ux, inv = np.unique(x[keep], return_inverse=True)
    uw = np.zeros(ux.size)
    np.add.at(uw, inv, w[keep])
    total = uw.sum()
    # weights already normalized to rounding are kept bit-identical (idempotence)
    p = uw if abs(total - 1.0) <= 1e-13 else uw / total
    return DiscreteMeasure(ux, p, float(mean_tolerance))


def discretize_uniform(a: float, b: float, n: int, mean_tolerance: float = DEFAULT_MEAN_TOL) -> DiscreteMeasure:
    """Midpoint discretization of Uniform[a, b] with ``n`` equal-weight atoms."""
    if not a < b:
        raise BadInterval(f"need a < b, got a={a}, b={b}")
    if n < 1:
        raise ValueError("n must be >= 1")
    i = np.arange(1, n + 1)
    x = a + (b - a) * (2 * i - 1) / (2 * n)
    if a == -b:
        # symmetric grid: force exact antisymmetry so the mean cancels exactly
        x = 0.5 * (x - x[::-1])
    return DiscreteMeasure(x, np.full(n, 1.0 / n), float(mean_tolerance))


def call_prices(mu: DiscreteMeasure, strikes: Sequence[float], forward: float = 0.0) -> np.ndarray:
    """Undiscounted call prices E[(X + forward - K)^+] for each strike."""
    k = np.asarray(strikes, dtype=float)[:, None]
    return np.maximum(mu.x[None, :] + forward - k, 0.0) @ mu.p


@dataclass(frozen=True)
class ImpliedMeasure:
    """Result of quote inversion with the diagnostics the pricing report carries."""

    measure: DiscreteMeasure
    left_boundary_mass: float
    right_boundary_mass: float
    boundary_rule: str = "one-sided-slope"


def breeden_litzenberger(
    quotes: Sequence[tuple[float, float]],
    forward: float,
    mean_tolerance: float = DEFAULT_MEAN_TOL,
    detail: bool = False,
):
    """Recover the terminal law from call quotes by second differences in strike.

    Interior atom ``K_i - forward`` gets the slope change of the call curve
    at ``K_i``; for equal strike spacing this is the usual second difference
    divided by the spacing. The residual mass goes to the end strikes in
    proportion to the one-sided slopes there (left: ``1 + C'(K_0+)``,
    right: ``-C'(K_last-)``), which recovers any measure supported on the
    strike grid exactly.
    """
    q = np.asarray(list(quotes), dtype=np.float64).reshape(-1, 2)
    if q.shape[0] < 3:
        raise TooFewQuotes(f"need at least 3 quotes, got {q.shape[0]}")
    if not np.all(np.isfinite(q)) or not np.isfinite(forward):
        raise NonFinite("quotes and forward must be finite")
    k, c = q[:, 0], q[:, 1]
    if np.any(np.diff(k) <= 0):
        raise ValueError("strikes must be strictly increasing")
    if np.any(c < -QUOTE_TOL):
        raise NonConvexQuotes("negative call price")

    slopes = np.diff(c) / np.diff(k)
    if np.any(slopes > QUOTE_TOL) or np.any(slopes < -1.0 - QUOTE_TOL):
        raise NonConvexQuotes("call prices must be nonincreasing with slope >= -1 in strike")
    interior = np.diff(slopes)
    bad = np.flatnonzero(interior < -QUOTE_TOL)
    if bad.size:
        i = bad[0] + 1
        raise NonConvexQuotes(f"negative butterfly at strike {k[i]!r} (second difference {interior[bad[0]]:.3g})")
    # second differences inside the tolerance band are rounding noise, not mass
    interior = np.where(interior > QUOTE_TOL, interior, 0.0)

    left = 1.0 + slopes[0]
    right = -slopes[-1]
    left = left if left > QUOTE_TOL else 0.0
    right = right if right > QUOTE_TOL else 0.0
    residual = 1.0 - interior.sum()
    if left + right > 0:
        left, right = residual * left / (left + right), residual * right / (left + right)
    weights = np.concatenate([[left], interior, [right]])
    mu = build_measure(zip(k - forward, weights), mean_tolerance)
    if detail:
        return ImpliedMeasure(mu, float(left), float(right))
    return mu
