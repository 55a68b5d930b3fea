"""Linear-programming oracle over the discrete Rogers polytope.

Couplings of a centered discrete measure with running-maximum values on a
finite level grid form a polytope: row sums fix the first marginal, the cell
set encodes the support constraint, and one inequality per grid level encodes
the tail-mean condition. Optimizing a payoff over it needs no closed-form
knowledge, which makes it an independent check of the optimizer module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .barycenter import barycenter
from .cost import CostFunction
from .coupling import Coupling, make_coupling
from .errors import GridTooCoarse, IterationLimit, NotCentered, SolverFailure
from .measure import DiscreteMeasure

log = logging.getLogger(__name__)

PIVOT_EPS = 1e-9
COST_EPS = 1e-10
STALL_LIMIT = 50
MASS_FLOOR = 1e-13


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """max c.z  s.t.  A_eq z = b_eq,  A_tail z >= 0,  z >= 0.

    Variable v is the mass at (mu.x[cell_i[v]], y_grid[cell_j[v]]). The
    objective is stored in maximization form; for ``sense == "min"`` it holds
    -F and :func:`solve_lp` flips the sign of the reported value.
    """

    mu: DiscreteMeasure
    y_grid: np.ndarray
    cost: CostFunction
    sense: str
    cell_i: np.ndarray
    cell_j: np.ndarray
    c: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    A_tail: np.ndarray
    start_cells: np.ndarray | None = None  # one feasible cell per atom (pure-jump vertex)

    @property
    def n_vars(self) -> int:
        return int(self.c.size)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.n_vars, self.A_eq.shape[0], self.A_tail.shape[0]


@dataclass
class LPSolution:
    value: float
    coupling: Coupling | None
    status: str
    iterations: int
    phase1_iterations: int = 0
    primal: np.ndarray | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "status": self.status,
            "iterations": self.iterations,
            "phase1_iterations": self.phase1_iterations,
            "n_support": None if self.coupling is None else self.coupling.n_atoms,
        }


def build_lp(mu: DiscreteMeasure, y_grid, F: CostFunction, sense: str = "max") -> LinearProgram:
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    if not mu.centered:
        raise NotCentered(f"LP oracle needs a centered measure (mean {mu.mean:.3g})")
    y = np.unique(np.asarray(y_grid, dtype=float))
    if y.size == 0 or y[0] != 0.0:
        raise GridTooCoarse("y_grid must contain 0")
    if np.any(y < 0):
        raise GridTooCoarse("y_grid must be nonnegative")
    floor = np.maximum(mu.x, 0.0)
    if np.any(floor > y[-1]):
        raise GridTooCoarse("y_grid lies strictly below max(0, x) for some atom")

    feasible = y[None, :] >= floor[:, None]
    cell_i, cell_j = np.nonzero(feasible)
    vals = np.asarray(F(mu.x[cell_i], y[cell_j]), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"{F.label} is not finite on the LP cells")
    c = vals if sense == "max" else -vals

    n_atoms = mu.n_atoms
    A_eq = np.zeros((n_atoms, cell_i.size))
    A_eq[cell_i, np.arange(cell_i.size)] = 1.0
    # tail row k: sum over cells with y_j >= s_k of (x_i - s_k) * z
    xs = mu.x[cell_i][None, :] - y[:, None]
    A_tail = np.where(y[cell_j][None, :] >= y[:, None], xs, 0.0)

    # pure-jump start: each atom at its lowest feasible level, if that level is exactly max(0, x)
    first = np.searchsorted(cell_i, np.arange(n_atoms), side="left")
    start = None
    if np.all(y[cell_j[first]] == floor):
        start = first
    return LinearProgram(mu, y, F, sense, cell_i, cell_j, c, A_eq, mu.p.copy(), A_tail, start)


# ---------------------------------------------------------------------------
# dense tableau simplex
# ---------------------------------------------------------------------------


class _Tableau:
    """Rows: m constraints then the reduced-cost row. Columns: variables then RHS."""

    def __init__(self, T: np.ndarray, basis: np.ndarray, n_allowed: int):
        self.T = T
        self.basis = basis
        self.n_allowed = n_allowed  # columns >= n_allowed never enter (artificials)

    @property
    def m(self) -> int:
        return self.T.shape[0] - 1

    def value(self) -> float:
        return float(self.T[-1, -1])

    def run(self, max_iter: int, counter: list[int]) -> str:
        T = self.T
        m = self.m
        stall = 0
        bland = False
        last_value = self.value()
        while True:
            if counter[0] >= max_iter:
                raise IterationLimit(f"simplex exceeded {max_iter} pivots")
            red = T[-1, : self.n_allowed]
            scale = max(1.0, float(np.max(np.abs(red))) if red.size else 1.0)
            if bland:
                neg = np.flatnonzero(red < -COST_EPS * scale)
                if neg.size == 0:
                    return "optimal"
                col = int(neg[0])
            else:
                col = int(np.argmin(red))
                if red[col] >= -COST_EPS * scale:
                    return "optimal"
            colv = T[:m, col]
            pos = np.flatnonzero(colv > PIVOT_EPS)
            if pos.size == 0:
                return "unbounded"
            ratios = T[pos, -1] / colv[pos]
            best = ratios.min()
            tie = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
            # smallest basic index among ties (Bland's leaving rule)
            row = int(tie[np.argmin(self.basis[tie])]) if bland else int(tie[np.argmax(colv[tie])])
            _kernels.pivot(T, row, col)
            self.basis[row] = col
            counter[0] += 1
            v = self.value()
            if v > last_value + 1e-12 * max(1.0, abs(last_value)):
                stall = 0
                bland = False
                last_value = v
            else:
                stall += 1
                if stall >= STALL_LIMIT and not bland:
                    log.debug("simplex: %d degenerate pivots, switching to Bland's rule", stall)
                    bland = True


def _tableau(lp: LinearProgram) -> tuple[np.ndarray, np.ndarray, int]:
    """Standard form with tail slacks: A_tail z - t = 0 written as -A_tail z + t = 0."""
    n = lp.n_vars
    m_eq = lp.A_eq.shape[0]
    k = lp.A_tail.shape[0]
    m = m_eq + k
    T = np.zeros((m + 1, n + k + 1))
    T[:m_eq, :n] = lp.A_eq
    T[:m_eq, -1] = lp.b_eq
    T[m_eq:m, :n] = -lp.A_tail
    T[m_eq:m, n : n + k] = np.eye(k)
    T[-1, :n] = -lp.c
    basis = np.full(m, -1, dtype=np.int64)
    basis[m_eq:] = n + np.arange(k)
    return T, basis, m_eq


def _phase1(T: np.ndarray, basis: np.ndarray, max_iter: int, counter: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Add artificials for uncovered or infeasible rows and drive them to zero."""
    m = T.shape[0] - 1
    ncols = T.shape[1] - 1
    T[:m][T[:m, -1] < 0] *= -1.0
    # rows whose basic column no longer reads as a unit vector need an artificial
    need = np.flatnonzero(basis < 0)
    for r in range(m):
        if basis[r] >= 0 and T[r, basis[r]] != 1.0:
            need = np.union1d(need, [r])
    n_art = need.size
    big = np.zeros((m + 1, ncols + n_art + 1))
    big[:m, :ncols] = T[:m, :ncols]
    big[:m, -1] = T[:m, -1]
    big[need, ncols + np.arange(n_art)] = 1.0
    basis = basis.copy()
    basis[need] = ncols + np.arange(n_art)
    # phase-1 objective: maximize -sum(artificials); price out basic artificials
    big[-1, ncols : ncols + n_art] = 1.0
    big[-1] -= big[need].sum(axis=0)
    tab = _Tableau(big, basis, ncols)
    status = tab.run(max_iter, counter)
    if status != "optimal" or tab.value() < -1e-9:
        return None, None
    # pivot remaining zero-level artificials out where possible
    for r in np.flatnonzero(tab.basis >= ncols):
        row = tab.T[r, :ncols]
        cand = np.flatnonzero(np.abs(row) > PIVOT_EPS)
        if cand.size:
            _kernels.pivot(tab.T, int(r), int(cand[0]))
            tab.basis[r] = cand[0]
    keep_rows = np.flatnonzero(tab.basis < ncols)
    out = np.zeros((keep_rows.size + 1, ncols + 1))
    out[:-1, :ncols] = tab.T[keep_rows, :ncols]
    out[:-1, -1] = tab.T[keep_rows, -1]
    return out, tab.basis[keep_rows]


def solve_lp(lp: LinearProgram, max_iter: int = 1_000_000) -> LPSolution:
    """Dense tableau simplex: Dantzig pricing, Bland's rule after a stall.

    Starts from the pure-jump vertex when the grid carries every max(0, x),
    otherwise runs a phase 1 on artificial variables.
    """
    T, basis, m_eq = _tableau(lp)
    n = lp.n_vars
    counter = [0]
    phase1 = 0
    crashed = False
    if lp.start_cells is not None:
        for r, v in enumerate(lp.start_cells):
            _kernels.pivot(T, r, int(v))
            basis[r] = v
        crashed = bool(np.all(T[:-1, -1] >= -1e-12))
        T[:-1, -1] = np.where(np.abs(T[:-1, -1]) < 1e-15, 0.0, T[:-1, -1])
    if not crashed:
        cost_row = np.concatenate([-lp.c, np.zeros(T.shape[1] - 1 - n)])
        T1, b1 = _phase1(T, basis, max_iter, counter)
        phase1 = counter[0]
        if T1 is None:
            return LPSolution(float("nan"), None, "infeasible", counter[0], phase1)
        T, basis = T1, b1
        # reprice the true objective against the phase-1 basis
        T[-1, :-1] = cost_row
        T[-1, -1] = 0.0
        for r, v in enumerate(basis):
            f = T[-1, v]
            if f != 0.0:
                T[-1] -= f * T[r]
    tab = _Tableau(T, basis, T.shape[1] - 1)
    status = tab.run(max_iter, counter)
    if status != "optimal":
        return LPSolution(float("inf") if lp.sense == "max" else float("-inf"), None, status, counter[0], phase1)

    z = np.zeros(T.shape[1] - 1)
    z[tab.basis] = tab.T[:-1, -1]
    primal = np.maximum(z[:n], 0.0)
    primal[primal < MASS_FLOOR] = 0.0
    value = float(np.dot(lp.c, primal))
    if lp.sense == "min":
        value = -value
    nz = primal > 0
    pi = make_coupling(zip(lp.mu.x[lp.cell_i[nz]], lp.y_grid[lp.cell_j[nz]], primal[nz]))
    return LPSolution(value, pi, "optimal", counter[0], phase1, primal)


# ---------------------------------------------------------------------------
# grids and the closed-form comparison
# ---------------------------------------------------------------------------


def _merge_close(levels: np.ndarray, tol: float) -> np.ndarray:
    """Collapse runs of levels closer than ``tol``, keeping the largest of each run."""
    levels = np.unique(levels)
    if levels.size < 2:
        return levels
    last_of_run = np.append(np.diff(levels) > tol, True)
    return levels[last_of_run]


def default_y_grid(mu: DiscreteMeasure, F: CostFunction | None = None, refine: int = 0) -> np.ndarray:
    """{0} + {max(0, x)} + {beta(x)} + {closed-form targets g(x)} + a uniform refinement.

    Candidate levels closer than 1e-12 are merged (keeping the larger, so every
    support floor stays on the grid); refinement points within 1e-9 of a
    candidate are dropped. Near-duplicate levels make the tableau ill-conditioned.
    """
    beta = barycenter(mu)
    parts = [np.zeros(1), np.maximum(mu.x, 0.0), beta.values]
    if F is not None:
        from .optimizer import optimal_map
        from .errors import RidgeUnavailable, NotUnimodal

        try:
            parts.append(optimal_map(mu, F).targets)
        except (RidgeUnavailable, NotUnimodal):
            pass
    cand = np.concatenate(parts)
    cand = _merge_close(cand[cand >= 0], 1e-12)
    cand[0] = 0.0
    if refine > 0:
        extra = np.linspace(0.0, float(beta.max_value), refine)
        near = np.min(np.abs(extra[:, None] - cand[None, :]), axis=1) <= 1e-9
        cand = np.unique(np.concatenate([cand, extra[~near]]))
    return cand


@dataclass(frozen=True)
class OracleGap:
    lp_value: float
    closed_form: float
    gap: float
    solution: LPSolution

    def __iter__(self):
        yield self.lp_value
        yield self.closed_form
        yield self.gap


def oracle_gap(mu: DiscreteMeasure, F: CostFunction, y_grid=None, max_iter: int = 1_000_000) -> OracleGap:
    from .optimizer import optimal_value

    if y_grid is None:
        y_grid = default_y_grid(mu, F)
    sol = solve_lp(build_lp(mu, y_grid, F, "max"), max_iter)
    if sol.status != "optimal":
        raise SolverFailure(f"LP oracle returned status {sol.status!r}")
    closed = optimal_value(mu, F)
    return OracleGap(sol.value, closed, sol.value - closed, sol)
