"""Closed-form optimal couplings: the graph of g(w) = min(beta(w), max(a_w, 0, w)).

Ridge +inf gives the Azéma-Yor graph g = beta; ridge -inf gives the pure-jump
graph g = max(0, w); a finite ridge interpolates between them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barycenter import BarycenterFunction, barycenter
from .cost import CostFunction, ridge_of
from .coupling import Coupling, expected_cost
from .errors import NotCentered, NotUnimodal, RidgeUnavailable
from .measure import DiscreteMeasure

BARYCENTER_CAPPED = "barycenter-capped"
RIDGE = "ridge"
FLOOR = "floor"
TIE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class OptimalMap:
    source: DiscreteMeasure
    targets: np.ndarray
    regimes: tuple[str, ...]
    ridge: np.ndarray  # a_x per atom, +-inf kept as declared
    ties: np.ndarray  # atoms where two regimes agree within TIE_EPS

    def regime_counts(self) -> dict[str, int]:
        out = {BARYCENTER_CAPPED: 0, RIDGE: 0, FLOOR: 0}
        for r in self.regimes:
            out[r] += 1
        return out


def _atom_ridge(mu: DiscreteMeasure, F: CostFunction, beta: BarycenterFunction, tol: float) -> np.ndarray:
    if F.ridge is not None:
        return np.asarray(F.ridge(mu.x), dtype=float) * np.ones(mu.n_atoms)
    floor = np.maximum(mu.x, 0.0)
    cap = np.maximum(beta.values, floor)
    a = np.empty(mu.n_atoms)
    for i, (w, lo, hi) in enumerate(zip(mu.x, floor, cap)):
        if hi - lo <= tol:
            # band collapsed to a point: any ridge gives the same target
            a[i] = lo
            continue
        try:
            a[i] = ridge_of(F, float(w), float(lo), float(hi), tol)
        except NotUnimodal as exc:
            raise RidgeUnavailable(f"{F.label}: {exc}") from exc
    return a


def optimal_map(mu: DiscreteMeasure, F: CostFunction, tol: float = 1e-10) -> OptimalMap:
    if not mu.centered:
        raise NotCentered(f"optimal_map needs a centered measure (mean {mu.mean:.3g})")
    beta = barycenter(mu)
    a = _atom_ridge(mu, F, beta, tol)
    if np.any(np.isnan(a)):
        raise RidgeUnavailable(f"{F.label}: ridge is undefined at some atom")
    floor = np.maximum(mu.x, 0.0)
    # a centered mean can round a hair below 0 at the bottom atom
    cap = np.maximum(beta.values, floor)
    # saturate +-inf before any arithmetic
    lifted = np.where(a == np.inf, cap, np.where(a == -np.inf, floor, np.maximum(a, floor)))
    g = np.minimum(cap, lifted)

    regimes = []
    ties = np.zeros(mu.n_atoms, dtype=bool)
    for i in range(mu.n_atoms):
        ai = a[i]
        if ai >= cap[i]:
            regimes.append(BARYCENTER_CAPPED)
        elif ai <= floor[i]:
            regimes.append(FLOOR)
        else:
            regimes.append(RIDGE)
        if np.isfinite(ai):
            ties[i] = abs(ai - cap[i]) <= TIE_EPS or abs(ai - floor[i]) <= TIE_EPS
        ties[i] |= abs(cap[i] - floor[i]) <= TIE_EPS
    g.setflags(write=False)
    return OptimalMap(mu, g, tuple(regimes), a, ties)


def pushforward(gmap: OptimalMap) -> Coupling:
    """The graph coupling {(x_i, g(x_i), p_i)}."""
    mu = gmap.source
    return Coupling(mu.x, gmap.targets, mu.p)


def optimal_value(mu: DiscreteMeasure, F: CostFunction) -> float:
    return expected_cost(pushforward(optimal_map(mu, F)), F)


def pure_jump(mu: DiscreteMeasure) -> Coupling:
    return Coupling(mu.x, np.maximum(mu.x, 0.0), mu.p)


def azema_yor(mu: DiscreteMeasure) -> Coupling:
    return Coupling(mu.x, np.maximum(barycenter(mu).values, np.maximum(mu.x, 0.0)), mu.p)
