"""Candidate joint laws of (terminal value, running maximum) as weighted atoms,
with Rogers' feasibility check and two mass-rearrangement operators."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .cost import CostFunction, Verdict
from .errors import (
    BadGeometry,
    EmptyMeasure,
    InsufficientMass,
    MissingDerivative,
    NonFinite,
    NotCrossed,
    SupportTooLarge,
)

DEFAULT_TOL = 1e-9
MAX_CYCLE_SUPPORT = 60


@dataclass(frozen=True, eq=False)
class Coupling:
    """Atoms ``(x[i], y[i])`` with positive ``mass[i]``; keys are unique."""

    x: np.ndarray
    y: np.ndarray
    mass: np.ndarray
    tolerance: float = DEFAULT_TOL

    def __post_init__(self):
        for name in ("x", "y", "mass"):
            a = np.array(getattr(self, name), dtype=np.float64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        if not (self.x.shape == self.y.shape == self.mass.shape) or self.x.ndim != 1 or self.x.size == 0:
            raise ValueError("x, y and mass must be nonempty 1-d arrays of equal length")
        if np.any(self.mass <= 0):
            raise ValueError("atom masses must be strictly positive")
        if abs(float(self.mass.sum()) - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {self.mass.sum()!r}, not 1")

    @property
    def n_atoms(self) -> int:
        return int(self.x.size)

    @property
    def atoms(self) -> list[tuple[float, float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist(), self.mass.tolist()))

    def mass_at(self, key: tuple[float, float]) -> float:
        hit = (self.x == key[0]) & (self.y == key[1])
        return float(self.mass[hit].sum())

    def x_marginal(self) -> tuple[np.ndarray, np.ndarray]:
        ux, inv = np.unique(self.x, return_inverse=True)
        w = np.zeros(ux.size)
        np.add.at(w, inv, self.mass)
        return ux, w

    def y_marginal(self) -> tuple[np.ndarray, np.ndarray]:
        uy, inv = np.unique(self.y, return_inverse=True)
        w = np.zeros(uy.size)
        np.add.at(w, inv, self.mass)
        return uy, w

    def __repr__(self) -> str:
        return f"Coupling(n_atoms={self.n_atoms})"


def make_coupling(
    triples: Iterable[tuple[float, float, float]],
    tolerance: float = DEFAULT_TOL,
    drop_below: float = 0.0,
) -> Coupling:
    """Merge duplicate keys, drop masses ``<= drop_below`` and renormalize."""
    arr = np.asarray(list(triples), dtype=np.float64).reshape(-1, 3)
    if arr.shape[0] == 0:
        raise EmptyMeasure("coupling has no atoms")
    if not np.all(np.isfinite(arr)):
        raise NonFinite("coupling entries must be finite")
    if np.any(arr[:, 2] < 0):
        raise ValueError("masses must be nonnegative")
    arr = arr[arr[:, 2] > drop_below]
    if arr.shape[0] == 0:
        raise EmptyMeasure("no atom carries positive mass")
    keys, inv = np.unique(arr[:, :2], axis=0, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    mass = np.zeros(keys.shape[0])
    np.add.at(mass, inv, arr[:, 2])
    total = mass.sum()
    if abs(total - 1.0) > 1e-13:
        mass = mass / total
    return Coupling(keys[:, 0], keys[:, 1], mass, tolerance)


def _replace(pi: Coupling, x, y, mass) -> Coupling:
    x, y, mass = (np.asarray(a, dtype=float) for a in (x, y, mass))
    keep = mass > 0
    keys, inv = np.unique(np.column_stack([x[keep], y[keep]]), axis=0, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    m = np.zeros(keys.shape[0])
    np.add.at(m, inv, mass[keep])
    return Coupling(keys[:, 0], keys[:, 1], m, pi.tolerance)


# ---------------------------------------------------------------------------
# Rogers feasibility
# ---------------------------------------------------------------------------


@dataclass
class RogersReport:
    integrable: bool
    mean_zero: bool
    mean_residual: float
    support_ok: bool
    worst_support_violation: float
    worst_support_atom: tuple[float, float] | None
    tail_ok: bool
    tail_levels: list[float] = field(default_factory=list)
    tail_slacks: list[float] = field(default_factory=list)
    tail_means: list[tuple[float, float]] = field(default_factory=list)
    tol: float = DEFAULT_TOL

    @property
    def ok(self) -> bool:
        return self.integrable and self.mean_zero and self.support_ok and self.tail_ok

    @property
    def tail_means_nondecreasing(self) -> bool:
        m = np.array([v for _, v in self.tail_means])
        return bool(np.all(np.diff(m) >= -self.tol)) if m.size > 1 else True

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["tail_means_nondecreasing"] = self.tail_means_nondecreasing
        d["min_tail_slack"] = min(self.tail_slacks) if self.tail_slacks else None
        return d


def tail_sums(pi: Coupling, levels) -> np.ndarray:
    """sum over atoms with y >= s of (x - s) * mass, for each level s."""
    s = np.asarray(levels, dtype=float)
    order = np.argsort(pi.y, kind="stable")
    y = pi.y[order]
    m = pi.mass[order]
    xm = pi.x[order] * m
    # suffix sums over y-sorted atoms
    suf_m = np.append(np.cumsum(m[::-1])[::-1], 0.0)
    suf_xm = np.append(np.cumsum(xm[::-1])[::-1], 0.0)
    idx = np.searchsorted(y, s, side="left")
    return suf_xm[idx] - s * suf_m[idx]


def validate_rogers(pi: Coupling, tol: float | None = None) -> RogersReport:
    """Check integrability, zero mean, support in M and the tail-mean condition.

    The tail condition sum_{y >= s} (x - s) mass >= 0 is checked only at s = 0
    and at the atom y-levels. Between consecutive levels the set {y >= s} is
    fixed, so the sum is affine in s with slope -(tail mass) <= 0; its minimum
    over each interval is attained at the right end, which is a checked level.
    Above the top level the sum is zero.
    """
    tol = pi.tolerance if tol is None else tol
    x, y, m = pi.x, pi.y, pi.mass
    integrable = bool(np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.isfinite(np.dot(np.abs(x), m)))
    residual = float(np.dot(x, m))

    viol = np.maximum(-y, x - y)
    k = int(np.argmax(viol))
    worst = float(viol[k])
    support_ok = worst <= tol

    levels = np.unique(np.concatenate([[0.0], y[y >= 0]]))
    slacks = tail_sums(pi, levels)
    tail_ok = bool(np.all(slacks >= -tol))

    order = np.argsort(y, kind="stable")
    suf_m = np.cumsum(m[order][::-1])[::-1]
    suf_xm = np.cumsum((x * m)[order][::-1])[::-1]
    idx = np.searchsorted(y[order], levels, side="left")
    nonempty = idx < y.size
    means = suf_xm[idx[nonempty]] / suf_m[idx[nonempty]]

    return RogersReport(
        integrable=integrable,
        mean_zero=abs(residual) <= tol,
        mean_residual=residual,
        support_ok=bool(support_ok),
        worst_support_violation=worst,
        worst_support_atom=(float(x[k]), float(y[k])),
        tail_ok=tail_ok,
        tail_levels=levels.tolist(),
        tail_slacks=slacks.tolist(),
        tail_means=list(zip(levels[nonempty].tolist(), means.tolist())),
        tol=tol,
    )


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------


def check_monotone_support(pi: Coupling, tol: float = 0.0) -> Verdict:
    """No pair with x1 < x2 and y1 > y2 (+ tol); atoms sharing an x are exempt."""
    ux, inv = np.unique(pi.x, return_inverse=True)
    inv = np.asarray(inv).reshape(-1)
    col_max = np.full(ux.size, -np.inf)
    col_min = np.full(ux.size, np.inf)
    np.maximum.at(col_max, inv, pi.y)
    np.minimum.at(col_min, inv, pi.y)
    prev_max = np.maximum.accumulate(col_max)
    bad = np.flatnonzero(col_min[1:] < prev_max[:-1] - tol)
    if bad.size == 0:
        return Verdict(True)
    j = int(bad[0]) + 1
    i = int(np.argmax(col_max[:j]))
    y_hi = col_max[i]
    y_lo = col_min[j]
    return Verdict(False, ((float(ux[i]), float(y_hi)), (float(ux[j]), float(y_lo))), float(y_hi - y_lo))


def check_cyclical_monotonicity(
    pi: Coupling, F: CostFunction, max_cycle: int = 3, tol: float = DEFAULT_TOL
) -> Verdict:
    """Exhaustive search for a cycle of length <= max_cycle whose reassignment
    x_t -> y_{t+1} increases the total payoff by more than ``tol``."""
    if max_cycle not in (2, 3, 4):
        raise ValueError("max_cycle must be 2, 3 or 4")
    if pi.n_atoms > MAX_CYCLE_SUPPORT:
        raise SupportTooLarge(f"support has {pi.n_atoms} atoms (limit {MAX_CYCLE_SUPPORT})")
    if pi.n_atoms < 2:
        return Verdict(True)
    A = np.asarray(F(pi.x[:, None], pi.y[None, :]), dtype=float)
    B = A - np.diag(A)[:, None]
    gain, cycle = _kernels.best_cycle(np.ascontiguousarray(B), max_cycle)
    if gain <= tol:
        return Verdict(True, None, float(gain))
    witness = tuple((float(pi.x[i]), float(pi.y[i])) for i in cycle)
    return Verdict(False, witness, float(gain))


# ---------------------------------------------------------------------------
# objective and improvement operators
# ---------------------------------------------------------------------------


def expected_cost(pi: Coupling, F: CostFunction) -> float:
    vals = np.asarray(F(pi.x, pi.y), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFinite(f"{F.label} is not finite on the support")
    return float(np.dot(vals, pi.mass))


def _locate(pi: Coupling, key) -> int:
    hit = np.flatnonzero((pi.x == key[0]) & (pi.y == key[1]))
    if hit.size == 0:
        raise InsufficientMass(f"no atom at {tuple(key)!r}")
    return int(hit[0])


def _take(mass: np.ndarray, i: int, amount: float) -> None:
    # snap exact exhaustion so the atom disappears instead of leaving 1e-17 dust
    if abs(mass[i] - amount) <= 1e-15:
        mass[i] = 0.0
    else:
        mass[i] -= amount


def swap_gain(F: CostFunction, p1, p2, m: float) -> float:
    (x1, y1), (x2, y2) = p1, p2
    return float(m * (F(x1, y2) + F(x2, y1) - F(x1, y1) - F(x2, y2)))


def swap_competitor(pi: Coupling, p1, p2, m: float) -> Coupling:
    """Uncross two atoms: move mass m from (x1,y1),(x2,y2) to (x1,y2),(x2,y1).

    Requires x1 < x2 and y1 > y2. The x-marginal is untouched and tail sums
    at levels in (y2, y1] gain m (x2 - x1) > 0, so feasibility is preserved.
    """
    (x1, y1), (x2, y2) = p1, p2
    if not (x1 < x2 and y1 > y2):
        raise NotCrossed(f"atoms {p1!r}, {p2!r} are not a crossed pair")
    if not m > 0:
        raise ValueError("swap mass must be positive")
    i, j = _locate(pi, p1), _locate(pi, p2)
    if m > min(pi.mass[i], pi.mass[j]) + 1e-15:
        raise InsufficientMass(f"swap mass {m!r} exceeds available atom mass")
    mass = pi.mass.copy()
    _take(mass, i, m)
    _take(mass, j, m)
    x = np.concatenate([pi.x, [x1, x2]])
    y = np.concatenate([pi.y, [y2, y1]])
    mass = np.concatenate([mass, [m, m]])
    return _replace(pi, x, y, mass)


@dataclass(frozen=True)
class LiftResult:
    coupling: Coupling
    gain: float  # quadrature of the continuum gain
    lowered_mass: float
    profile: np.ndarray  # mass lifted to at-or-above each q_grid level

    def __iter__(self):
        yield self.coupling
        yield self.gain


def lift_profile(q, w1: float, w2: float, s2: float, m: float) -> np.ndarray:
    """Mass that must sit at or above level q on the w2 column after a lift."""
    q = np.asarray(q, dtype=float)
    return m * (q - w1) * (s2 - w2) / ((q - w2) * (s2 - w1))


def lift_gain_quadrature(F: CostFunction, w1: float, s1: float, w2: float, s2: float, m: float, q_grid) -> float:
    """Trapezoid quadrature on {s2} + q_grid of the lift gain

        int_{s2}^{s1} F_s(w2, q) h(q) dq - int_{s2}^{s1} F_s(w1, q) m' dq

    with h the lift profile and m' = m (s2 - w2)/(s2 - w1) the lowered mass.
    """
    if F.s_derivative is None:
        raise MissingDerivative(f"{F.label} has no s-derivative")
    nodes = np.concatenate([[s2], np.asarray(q_grid, dtype=float)])
    lowered = m * (s2 - w2) / (s2 - w1)
    up = F.s_derivative(np.full_like(nodes, w2), nodes) * lift_profile(nodes, w1, w2, s2, m)
    down = F.s_derivative(np.full_like(nodes, w1), nodes) * lowered
    return float(np.trapezoid(up - down, nodes))


def hk_lift(pi: Coupling, p1, p2, m: float, F: CostFunction, q_grid: Sequence[float]) -> LiftResult:
    """Lower mass on the w1 column and lift a profile of mass on the w2 column.

    ``p1 = (w1, s1)`` and ``p2 = (w2, s2)`` with w1 < w2 <= s2 < s1. Mass
    m' = m (s2 - w2)/(s2 - w1) drops from (w1, s1) to (w1, s2); from (w2, s2)
    the profile h(q) is moved to the levels of ``q_grid`` so that exactly h(q)
    sits at or above each grid level q. At every grid level the tail sum gains
    h(q)(w2 - q) and loses m'(w1 - q), which cancel.
    """
    (w1, s1), (w2, s2) = p1, p2
    if not (w1 < w2 <= s2 < s1):
        raise BadGeometry("need w1 < w2 <= s2 < s1")
    if F.s_derivative is None:
        raise MissingDerivative(f"{F.label} has no s-derivative")
    q = np.asarray(q_grid, dtype=float)
    if q.ndim != 1 or q.size == 0 or np.any(np.diff(q) <= 0):
        raise BadGeometry("q_grid must be a nonempty ascending sequence")
    if q[0] <= s2 or q[-1] != s1:
        raise BadGeometry("q_grid must lie in (s2, s1] and contain s1")
    if not m > 0:
        raise ValueError("lift mass must be positive")

    i, j = _locate(pi, p1), _locate(pi, p2)
    lowered = m * (s2 - w2) / (s2 - w1)
    if m > pi.mass[j] + 1e-15 or lowered > pi.mass[i] + 1e-15:
        raise InsufficientMass("lift needs m at (w2, s2) and m (s2-w2)/(s2-w1) at (w1, s1)")

    h = lift_profile(q, w1, w2, s2, m)
    pieces = h - np.append(h[1:], 0.0)
    residue = m - h[0]

    mass = pi.mass.copy()
    _take(mass, i, lowered)
    _take(mass, j, m)
    x = np.concatenate([pi.x, [w1, w2], np.full(q.size, w2)])
    y = np.concatenate([pi.y, [s2, s2], q])
    mass = np.concatenate([mass, [lowered, residue], pieces])
    gain = lift_gain_quadrature(F, w1, s1, w2, s2, m, q)
    return LiftResult(_replace(pi, x, y, mass), gain, float(lowered), h)
