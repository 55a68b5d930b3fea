"""Monte Carlo check of the Azéma-Yor embedding on a lattice random walk.

A symmetric walk with spacing h (time step h^2) starts at 0 and stops the
first time its running maximum reaches the barycenter of its current value.
For a centered measure on the lattice the walk can only enter the stopping
region at an atom, so the stopped value has exactly the target law (up to
truncation at ``max_steps``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _accel, _kernels
from .barycenter import barycenter
from .errors import GridMismatch, NoStoppedSamples, NotCentered, OffLattice
from .measure import DiscreteMeasure, build_measure

LATTICE_TOL = 1e-9


@dataclass(frozen=True)
class WalkConfig:
    step: float = 0.01
    n_paths: int = 100_000
    max_steps: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("step must be positive")
        if self.n_paths < 1 or self.max_steps < 0:
            raise ValueError("n_paths must be >= 1 and max_steps >= 0")

    @property
    def horizon(self) -> float:
        return self.max_steps * self.step**2


@dataclass(frozen=True)
class EmbeddingSample:
    terminal: float
    running_max: float
    stopped: bool


@dataclass(frozen=True, eq=False)
class Samples:
    """Columnar simulation output; iterate for :class:`EmbeddingSample` rows."""

    terminal: np.ndarray
    running_max: np.ndarray
    stopped: np.ndarray
    steps: np.ndarray
    config: WalkConfig

    def __len__(self) -> int:
        return int(self.terminal.size)

    def __iter__(self):
        for t, s, ok in zip(self.terminal.tolist(), self.running_max.tolist(), self.stopped.tolist()):
            yield EmbeddingSample(t, s, ok)

    @property
    def truncation_rate(self) -> float:
        return float(1.0 - self.stopped.mean())

    def stopped_only(self) -> tuple[np.ndarray, np.ndarray]:
        return self.terminal[self.stopped], self.running_max[self.stopped]


def snap_to_lattice(mu: DiscreteMeasure, step: float) -> DiscreteMeasure:
    """Round atoms to the nearest multiple of ``step`` (merging collisions)."""
    k = np.round(mu.x / step)
    return build_measure(zip(k * step, mu.p), mu.mean_tolerance)


def _lattice_index(mu: DiscreteMeasure, step: float) -> np.ndarray:
    k = np.round(mu.x / step)
    if np.any(np.abs(mu.x - k * step) > LATTICE_TOL * max(1.0, step)):
        raise OffLattice(f"atoms must be multiples of step={step!r}; use snap_to_lattice")
    return k.astype(np.int64)


def stopping_thresholds(mu: DiscreteMeasure, step: float) -> tuple[np.ndarray, int]:
    """Barycenter at every lattice point between the extreme atoms, in lattice units.

    Returned thresholds are shifted down by a small slack so a running maximum
    that equals the barycenter up to rounding counts as reaching it.
    """
    k = _lattice_index(mu, step)
    lo, hi = int(k[0]), int(k[-1])
    beta = barycenter(mu)
    pts = np.arange(lo, hi + 1)
    # closed tail: lattice point w uses the tail mean of the first atom >= w
    idx = np.searchsorted(k, pts, side="left")
    thr = beta.values[idx] / step - LATTICE_TOL
    return np.ascontiguousarray(thr), lo


def simulate_ay(mu: DiscreteMeasure, cfg: WalkConfig) -> Samples:
    if not mu.centered:
        raise NotCentered(f"simulate_ay needs a centered measure (mean {mu.mean:.3g})")
    thr, lo = stopping_thresholds(mu, cfg.step)
    _accel.apply_thread_cap()
    W, S, stopped, steps = _kernels.walk(thr, lo, int(cfg.seed) & 0xFFFFFFFFFFFFFFFF, int(cfg.n_paths), int(cfg.max_steps))
    return Samples(W * cfg.step, S * cfg.step, np.asarray(stopped, dtype=bool), steps, cfg)


def empirical_survival(samples, levels) -> np.ndarray:
    """Rows (level, fraction of stopped samples with running_max >= level)."""
    if isinstance(samples, Samples):
        _, smax = samples.stopped_only()
    else:
        smax = np.array([s.running_max for s in samples if s.stopped], dtype=float)
    if smax.size == 0:
        raise NoStoppedSamples("no stopped samples")
    lv = np.asarray(levels, dtype=float)
    srt = np.sort(smax)
    # tolerance keeps lattice values like 0.5 (stored as 50 * 0.01) on the closed side
    frac = 1.0 - np.searchsorted(srt, lv - LATTICE_TOL, side="left") / srt.size
    return np.column_stack([lv, frac])


def empirical_cdf(values, points) -> np.ndarray:
    v = np.sort(np.asarray(values, dtype=float))
    pts = np.asarray(points, dtype=float)
    return np.searchsorted(v, pts + LATTICE_TOL, side="right") / v.size


def ks_distance(empirical, theoretical) -> float:
    """Max absolute difference between two (level, prob) tables on a common grid."""
    e = np.asarray(empirical, dtype=float).reshape(-1, 2)
    t = np.asarray(theoretical, dtype=float).reshape(-1, 2)
    if e.shape != t.shape or not np.allclose(e[:, 0], t[:, 0], rtol=0, atol=1e-12):
        raise GridMismatch("tables must share the same level grid")
    return float(np.max(np.abs(e[:, 1] - t[:, 1]))) if e.size else 0.0


def terminal_ks(samples: Samples, mu: DiscreteMeasure) -> float:
    """Kolmogorov-Smirnov distance between stopped terminals and ``mu``, at the atoms."""
    term, _ = samples.stopped_only()
    if term.size == 0:
        raise NoStoppedSamples("no stopped samples")
    emp = np.column_stack([mu.x, empirical_cdf(term, mu.x)])
    theo = np.column_stack([mu.x, mu.cdf(mu.x)])
    return ks_distance(emp, theo)
