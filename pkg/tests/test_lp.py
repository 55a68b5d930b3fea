import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from maxcoupling import (
    ay_example,
    build_lp,
    build_measure,
    check_monotone_support,
    default_y_grid,
    discretize_uniform,
    expected_cost,
    hk_example,
    make_coupling,
    optimal_value,
    oracle_gap,
    pure_jump_example,
    ridge_example,
    solve_lp,
    swap_competitor,
    validate_rogers,
)
from maxcoupling.cost import running_max
from maxcoupling.errors import GridTooCoarse, IterationLimit, NotCentered

from conftest import centered_measures, random_centered


def highs_value(lp):
    """Same LP solved by scipy's HiGHS, for cross-checking."""
    res = linprog(
        -lp.c,
        A_ub=-lp.A_tail,
        b_ub=np.zeros(lp.A_tail.shape[0]),
        A_eq=lp.A_eq,
        b_eq=lp.b_eq,
        bounds=(0, None),
        method="highs",
    )
    assert res.status == 0
    v = float(lp.c @ res.x)
    return v if lp.sense == "max" else -v


def test_build_mu2_cells(mu2):
    lp = build_lp(mu2, [0, 0.5, 1], running_max())
    assert lp.n_vars == 4
    assert lp.A_eq.shape == (2, 4) and lp.A_tail.shape == (3, 4)
    assert np.all(lp.A_eq.sum(axis=0) == 1)


def test_single_atom():
    mu = build_measure([(0, 1)])
    F = hk_example()
    sol = solve_lp(build_lp(mu, [0], F))
    assert sol.status == "optimal" and sol.value == pytest.approx(float(F(0, 0)))


def test_grid_guards(mu2):
    with pytest.raises(GridTooCoarse):
        build_lp(mu2, [0.5, 1], running_max())
    with pytest.raises(GridTooCoarse):
        build_lp(mu2, [0, 0.5], running_max())
    with pytest.raises(NotCentered):
        build_lp(build_measure([(1, 1)]), [0, 1], running_max())
    with pytest.raises(ValueError):
        build_lp(mu2, [0, 1], running_max(), sense="sideways")


def test_running_max_mu2_approaches_log2(mu2):
    sol = solve_lp(build_lp(mu2, np.linspace(0, 1, 201), running_max()))
    assert np.log(2) - 0.01 <= sol.value <= np.log(2) + 1e-9
    assert validate_rogers(sol.coupling, 1e-7).ok


@given(centered_measures(max_atoms=6))
@settings(max_examples=25, deadline=None)
def test_min_running_max_is_pure_jump(mu):
    y = default_y_grid(mu, refine=9)
    sol = solve_lp(build_lp(mu, y, running_max(), "min"))
    assert sol.value == pytest.approx(float(np.dot(np.maximum(mu.x, 0), mu.p)), abs=1e-9)


def test_iteration_limit():
    mu = discretize_uniform(-1, 1, 20)
    with pytest.raises(IterationLimit):
        solve_lp(build_lp(mu, np.linspace(0, 1, 41), ay_example()), max_iter=3)


@settings(max_examples=30, deadline=None)
@given(centered_measures(max_atoms=7), st.sampled_from(["ay", "ridge", "hk", "pure_jump"]), st.sampled_from(["max", "min"]))
def test_matches_highs(mu, name, sense):
    F = {"ay": ay_example(), "ridge": ridge_example(), "hk": hk_example(), "pure_jump": pure_jump_example()}[name]
    lp = build_lp(mu, default_y_grid(mu, F, refine=12), F, sense)
    sol = solve_lp(lp)
    assert sol.status == "optimal"
    assert sol.value == pytest.approx(highs_value(lp), abs=1e-8)
    assert validate_rogers(sol.coupling, 1e-7).ok
    ux, w = sol.coupling.x_marginal()
    np.testing.assert_allclose(ux, mu.x)
    np.testing.assert_allclose(w, mu.p, rtol=0, atol=1e-9)
    assert expected_cost(sol.coupling, F) == pytest.approx(sol.value, abs=1e-9)


def test_phase1_path_without_floor_levels():
    # the floor 0.5 of the middle atom is off-grid, so the crash basis is unusable
    mu = build_measure([(-1, 0.5), (0.5, 0.25), (1.5, 0.25)])
    lp = build_lp(mu, [0.0, 0.6, 1.0, 1.5], ay_example())
    assert lp.start_cells is None
    sol = solve_lp(lp)
    assert sol.value == pytest.approx(highs_value(lp), abs=1e-9)
    assert sol.phase1_iterations > 0
    assert validate_rogers(sol.coupling, 1e-7).ok


def test_oracle_gap_uniform50():
    mu = discretize_uniform(-1, 1, 50)
    F = ay_example()
    y = np.unique(np.concatenate([[0.0], np.maximum(mu.x, 0), np.maximum(np.cumsum((mu.x * mu.p)[::-1])[::-1] / np.cumsum(mu.p[::-1])[::-1], 0)]))
    gap = oracle_gap(mu, F, y)
    assert 0 - 1e-7 <= gap.gap <= 5 / 50
    lp_value, closed, g = gap
    assert lp_value - closed == g


def test_oracle_gap_single_atom():
    lp_value, closed, gap = oracle_gap(build_measure([(0, 1)]), ay_example())
    assert gap == 0.0


def test_oracle_gap_pure_jump(mu3):
    for refine in (0, 7, 30):
        gap = oracle_gap(mu3, pure_jump_example(), default_y_grid(mu3, pure_jump_example(), refine))
        assert gap.gap == pytest.approx(0.0, abs=1e-12)


def test_refinement_monotone(mu3):
    F = ay_example()
    vals = [solve_lp(build_lp(mu3, np.linspace(0, 2, k), F)).value for k in (3, 5, 9, 17)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_lp_optimum_resists_swaps():
    rng = np.random.default_rng(4)
    F = ay_example()
    for _ in range(10):
        mu = random_centered(rng, 6)
        sol = solve_lp(build_lp(mu, default_y_grid(mu, F, refine=10), F))
        pi = sol.coupling
        assert check_monotone_support(pi, tol=1e-9)
        # any swap on a monotone optimum uncrosses nothing and cannot help
        for i in range(pi.n_atoms):
            for j in range(pi.n_atoms):
                if pi.x[i] < pi.x[j] and pi.y[i] > pi.y[j]:
                    m = min(pi.mass[i], pi.mass[j])
                    new = swap_competitor(pi, (pi.x[i], pi.y[i]), (pi.x[j], pi.y[j]), m)
                    assert expected_cost(new, F) <= sol.value + 1e-7


def test_default_grid_contents(mu3):
    y = default_y_grid(mu3, ridge_example(), refine=5)
    assert y[0] == 0.0
    for v in (2 / 3, 2.0, 0.5, 1.0):
        assert np.min(np.abs(y - v)) <= 1e-12
    assert np.all(np.diff(y) > 1e-12)


def test_solution_report(mu2):
    d = solve_lp(build_lp(mu2, [0, 0.5, 1], running_max())).to_dict()
    assert d["status"] == "optimal" and d["n_support"] >= 2
