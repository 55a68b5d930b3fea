"""Barycenter (tail-mean) function of a discrete measure, its inverse, and the
Azéma-Yor law of the running maximum."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import AboveSupport, NotCentered, OutOfRange
from .measure import DiscreteMeasure

_RANGE_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class BarycenterFunction:
    """Step function k -> E[X | X >= k] of a discrete measure.

    ``values[i]`` is the tail mean over atoms at or above ``breakpoints[i]``
    and applies to every k in ``(breakpoints[i-1], breakpoints[i]]``. For
    k at or below the smallest atom the value is ``base_value`` (the mean).
    Above the largest atom the tail is empty and evaluation raises.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    base_value: float
    tail_mass: np.ndarray  # tail_mass[i] = mu([breakpoints[i], inf))

    def __call__(self, k):
        k_arr = np.asarray(k, dtype=float)
        if np.any(k_arr > self.breakpoints[-1]):
            raise AboveSupport(f"barycenter undefined above the top atom {self.breakpoints[-1]!r}")
        idx = np.searchsorted(self.breakpoints, k_arr, side="left")
        out = self.values[idx]
        return float(out) if out.ndim == 0 else out

    @property
    def max_value(self) -> float:
        return float(self.values[-1])

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.breakpoints.tolist(), self.values.tolist()))


def barycenter(mu: DiscreteMeasure) -> BarycenterFunction:
    x, p = mu.x, mu.p
    tail_p = np.cumsum(p[::-1])[::-1]
    tail_xp = np.cumsum((x * p)[::-1])[::-1]
    values = tail_xp / tail_p
    values[-1] = x[-1]
    # rounding can break monotonicity by an ulp where tails barely differ
    values = np.maximum.accumulate(values)
    values = np.maximum(values, x)
    for arr in (values, tail_p):
        arr.setflags(write=False)
    return BarycenterFunction(x.copy(), values, float(values[0]), tail_p)


class InverseValue(NamedTuple):
    """Generalized inverse value; ``exclusive`` means the infimum is not attained,
    i.e. the level is first reached just to the right of ``k``."""

    k: float
    exclusive: bool


def _first_reaching(values: np.ndarray, l: float) -> int:
    return int(np.searchsorted(values, l, side="left"))


def inverse_barycenter(beta: BarycenterFunction, l: float) -> InverseValue:
    """inf{k : beta(k) >= l}, restricted to the support hull of the measure."""
    if l < beta.base_value - _RANGE_SLACK or l > beta.max_value + _RANGE_SLACK:
        raise OutOfRange(f"level {l!r} outside [{beta.base_value!r}, {beta.max_value!r}]")
    j = _first_reaching(beta.values, min(max(l, beta.base_value), beta.max_value))
    if j == 0:
        return InverseValue(float(beta.breakpoints[0]), False)
    return InverseValue(float(beta.breakpoints[j - 1]), True)


@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    """l -> P(S >= l) for the graph (Azéma-Yor) coupling of a discrete measure.

    ``probs`` uses the open tail at an exclusive inverse (the mass strictly to
    the right of the inverse point, which is what the graph coupling realizes);
    ``closed_probs`` adds the atom at the inverse point. The two agree in the
    atomless limit.
    """

    levels: np.ndarray
    probs: np.ndarray
    closed_probs: np.ndarray
    _values: np.ndarray
    _tail_mass: np.ndarray

    def __call__(self, l):
        l_arr = np.asarray(l, dtype=float)
        j = np.searchsorted(self._values, l_arr, side="left")
        tail = np.append(self._tail_mass, 0.0)
        out = tail[j]
        return float(out) if out.ndim == 0 else out

    def right_limit(self, l):
        """lim_{t -> l+} P(S >= t), the value on the step just above ``l``."""
        l_arr = np.asarray(l, dtype=float)
        j = np.searchsorted(self._values, l_arr, side="right")
        tail = np.append(self._tail_mass, 0.0)
        out = tail[j]
        return float(out) if out.ndim == 0 else out

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.levels.tolist(), self.probs.tolist()))


def max_law(mu: DiscreteMeasure, beta: BarycenterFunction | None = None) -> SurvivalCurve:
    """Survival function of the running maximum under the Azéma-Yor graph coupling.

    Exact for atomless laws; for atomic laws this is the law of beta(X) and
    the randomized extremal law can put more mass on high levels.
    """
    if not mu.centered:
        raise NotCentered(f"max_law needs a centered measure (mean {mu.mean:.3g})")
    if beta is None:
        beta = barycenter(mu)
    values = beta.values.copy()
    values[0] = 0.0  # centered: the mean is zero up to tolerance
    values = np.maximum.accumulate(values)
    levels = np.unique(values)
    tail = beta.tail_mass
    j = np.searchsorted(values, levels, side="left")
    probs = tail[j]
    closed = tail[np.maximum(j - 1, 0)]
    return SurvivalCurve(levels, probs, closed, values, tail.copy())
