"""Bivariate payoffs F(w, s) of the terminal value w and running maximum s,
plus grid-based checks of the structural hypotheses the optimizers rely on.

Evaluators must accept numpy arrays and broadcast like ufuncs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadGrid, MissingDerivative, NotUnimodal

STRICT_EPS = 1e-12

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CostFunction:
    evaluator: Evaluator
    s_derivative: Evaluator | None = None
    ridge: Callable[[np.ndarray], np.ndarray] | None = None
    label: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, w, s):
        return self.evaluator(np.asarray(w, dtype=float), np.asarray(s, dtype=float))

    def __add__(self, other: "CostFunction") -> "CostFunction":
        f, g = self.evaluator, other.evaluator
        fs, gs = self.s_derivative, other.s_derivative
        deriv = None
        if fs is not None and gs is not None:
            deriv = lambda w, s: fs(w, s) + gs(w, s)  # noqa: E731
        # the ridge of a sum is not the sum of ridges; ridge_of recovers it numerically
        return CostFunction(
            lambda w, s: f(w, s) + g(w, s),
            deriv,
            None,
            f"{self.label}+{other.label}",
            {"terms": [self.params, other.params]},
        )


@dataclass(frozen=True)
class Verdict:
    ok: bool
    witness: tuple | None = None
    value: float | None = None  # the offending cross-difference or ratio gap

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Ridge:
    w: np.ndarray
    a: np.ndarray

    def is_nondecreasing(self) -> bool:
        # +inf/-inf compare correctly; nan never appears in a sampled ridge
        return bool(np.all(self.a[1:] >= self.a[:-1]))


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------


def _plus_inf(w):
    return np.full(np.shape(w), np.inf)


def _minus_inf(w):
    return np.full(np.shape(w), -np.inf)


def ay_example() -> CostFunction:
    """(arctan w + 2) s: strictly supermodular, increasing in s (ridge at +inf)."""
    return CostFunction(
        lambda w, s: (np.arctan(w) + 2.0) * s,
        lambda w, s: (np.arctan(w) + 2.0) + 0.0 * s,
        _plus_inf,
        "ay_example",
    )


def pure_jump_example() -> CostFunction:
    """-|w| s: decreasing in s (ridge at -inf); not supermodular for positive w."""
    return CostFunction(
        lambda w, s: -np.abs(w) * s,
        lambda w, s: -np.abs(w) + 0.0 * s,
        _minus_inf,
        "pure_jump_example",
    )


def ridge_example(slope: float = 1.0, intercept: float = 0.5) -> CostFunction:
    """(arctan w + 2) s - 4 (s - R(w))^+ with the increasing ridge R(w) = slope*w + intercept."""
    if slope <= 0:
        raise ValueError("ridge slope must be positive (R increasing)")

    def R(w):
        return slope * np.asarray(w, dtype=float) + intercept

    return CostFunction(
        lambda w, s: (np.arctan(w) + 2.0) * s - 4.0 * np.maximum(s - R(w), 0.0),
        lambda w, s: (np.arctan(w) + 2.0) - 4.0 * (s >= R(w)),
        R,
        "ridge_example",
        {"slope": slope, "intercept": intercept},
    )


INDICATOR_KINDS = ("ge_ge", "le_le", "neg_gt_lt", "neg_lt_gt")


def indicator(a: float, b: float, kind: str = "ge_ge") -> CostFunction:
    """Closed-boundary indicator costs that are supermodular without continuity.

    ``ge_ge``: Ind{w >= a, s >= b}; ``le_le``: Ind{w <= a, s <= b};
    ``neg_gt_lt``: -Ind{w > a, s < b}; ``neg_lt_gt``: -Ind{w < a, s > b}.
    """
    if kind == "ge_ge":
        ev = lambda w, s: ((w >= a) & (s >= b)).astype(float)  # noqa: E731
    elif kind == "le_le":
        ev = lambda w, s: ((w <= a) & (s <= b)).astype(float)  # noqa: E731
    elif kind == "neg_gt_lt":
        ev = lambda w, s: -((w > a) & (s < b)).astype(float)  # noqa: E731
    elif kind == "neg_lt_gt":
        ev = lambda w, s: -((w < a) & (s > b)).astype(float)  # noqa: E731
    else:
        raise ValueError(f"unknown indicator kind {kind!r}; expected one of {INDICATOR_KINDS}")
    return CostFunction(ev, None, None, f"indicator[{kind}]", {"a": a, "b": b, "kind": kind})


def indicator_variants(a: float, b: float) -> list[CostFunction]:
    return [indicator(a, b, k) for k in INDICATOR_KINDS[1:]]


def hk_example() -> CostFunction:
    """e^w (s - w)^2 / 2, whose s-derivative (s - w) e^w has the increasing ratio e^w.

    Fails supermodularity where s - w < 1 (mixed derivative e^w (s - w - 1)).
    """
    return CostFunction(
        lambda w, s: 0.5 * np.exp(w) * (s - w) ** 2,
        lambda w, s: (s - w) * np.exp(w),
        None,
        "hk_example",
    )


def constant(c: float = 1.0) -> CostFunction:
    return CostFunction(lambda w, s: np.full(np.broadcast(w, s).shape, float(c)), lambda w, s: 0.0 * (w + s), None, "constant", {"c": c})


def running_max() -> CostFunction:
    """F(w, s) = s: the expected running maximum."""
    return CostFunction(lambda w, s: s + 0.0 * w, lambda w, s: 1.0 + 0.0 * (w + s), _plus_inf, "running_max")


def terminal() -> CostFunction:
    return CostFunction(lambda w, s: w + 0.0 * s, lambda w, s: 0.0 * (w + s), None, "terminal")


CATALOGUE: dict[str, Callable[..., CostFunction]] = {
    "ay_example": ay_example,
    "pure_jump_example": pure_jump_example,
    "ridge_example": ridge_example,
    "indicator": indicator,
    "hk_example": hk_example,
    "running_max": running_max,
    "constant": constant,
}


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------


def _grid(values: Sequence[float], name: str) -> np.ndarray:
    g = np.asarray(values, dtype=float)
    if g.ndim != 1 or g.size < 2:
        raise BadGrid(f"{name} needs at least 2 points")
    if np.any(np.diff(g) <= 0):
        raise BadGrid(f"{name} must be strictly ascending")
    return g


def cross_differences(F: CostFunction, w_grid, s_grid) -> np.ndarray:
    """Adjacent-cell cross differences F(w1,s1)+F(w2,s2)-F(w1,s2)-F(w2,s1)."""
    w = _grid(w_grid, "w_grid")
    s = _grid(s_grid, "s_grid")
    V = F(w[:, None], s[None, :])
    return V[:-1, :-1] + V[1:, 1:] - V[:-1, 1:] - V[1:, :-1]


def check_supermodular(F: CostFunction, w_grid, s_grid, strict: bool = False) -> Verdict:
    """Check the supermodular inequality on every grid rectangle.

    Only adjacent rectangles are tested: the cross difference of any larger
    rectangle is the sum of the adjacent ones it covers.
    """
    w = _grid(w_grid, "w_grid")
    s = _grid(s_grid, "s_grid")
    D = cross_differences(F, w, s)
    bad = D <= STRICT_EPS if strict else D < -STRICT_EPS
    if not np.any(bad):
        return Verdict(True)
    i, j = np.argwhere(bad)[0]
    return Verdict(False, (float(w[i]), float(w[i + 1]), float(s[j]), float(s[j + 1])), float(D[i, j]))


def _section_pattern(vals: np.ndarray) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(vals))))
    d = np.diff(vals)
    eps = 1e-13 * scale
    return np.where(d > eps, 1, np.where(d < -eps, -1, 0))


def ridge_of(F: CostFunction, w: float, s_lo: float, s_hi: float, tol: float = 1e-9, n_probe: int = 257) -> float:
    """Peak location of the section s -> F(w, s) on [s_lo, s_hi].

    Returns the declared ridge when the cost carries one. Otherwise probes the
    section, rejects sections with a plateau or more than one local maximum,
    and refines the peak by ternary search. An increasing section gives +inf,
    a decreasing one -inf.
    """
    if F.ridge is not None:
        return float(F.ridge(np.asarray(w, dtype=float)))
    if not s_lo < s_hi:
        raise ValueError("need s_lo < s_hi")
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = np.linspace(s_lo, s_hi, n_probe)
    vals = np.asarray(F(np.full_like(grid, w), grid), dtype=float)
    pat = _section_pattern(vals)
    if np.any(pat == 0) and (grid[1] - grid[0]) > tol:
        raise NotUnimodal(f"section at w={w!r} has a plateau wider than tol")
    # unimodal: some +1's followed only by -1's
    first_down = np.flatnonzero(pat < 0)
    if first_down.size and np.any(pat[first_down[0]:] > 0):
        raise NotUnimodal(f"section at w={w!r} has more than one local maximum")
    if not first_down.size:
        return float("inf")
    if first_down[0] == 0:
        return float("-inf")

    k = int(first_down[0])  # grid[k] is the best probe
    lo, hi = grid[k - 1], grid[k + 1]
    fw = np.asarray(w, dtype=float)
    while hi - lo > tol:
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if F(fw, m1) < F(fw, m2):
            lo = m1
        else:
            hi = m2
    return float(0.5 * (lo + hi))


def sample_ridge(F: CostFunction, w_grid, s_lo: float, s_hi: float, tol: float = 1e-9) -> Ridge:
    w = np.asarray(w_grid, dtype=float)
    a = np.array([ridge_of(F, wi, s_lo, s_hi, tol) for wi in w])
    return Ridge(w, a)


def check_hk_ratio(F: CostFunction, s0: float, w_grid) -> Verdict:
    """Strict increase of F_s(w, s0) / (s0 - w) along an ascending grid below s0."""
    if F.s_derivative is None:
        raise MissingDerivative(f"{F.label} has no s-derivative")
    if not s0 > 0:
        raise ValueError("s0 must be positive")
    w = _grid(w_grid, "w_grid")
    if np.any(w >= s0):
        raise BadGrid("all w must lie below s0")
    r = F.s_derivative(w, np.full_like(w, s0)) / (s0 - w)
    d = np.diff(r)
    bad = np.flatnonzero(d <= STRICT_EPS)
    if bad.size == 0:
        return Verdict(True)
    i = int(bad[0])
    return Verdict(False, (float(w[i]), float(w[i + 1])), float(d[i]))
