import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxcoupling import (
    CostFunction,
    ay_example,
    barycenter,
    build_measure,
    check_cyclical_monotonicity,
    check_monotone_support,
    discretize_uniform,
    expected_cost,
    hk_example,
    optimal_map,
    optimal_value,
    pure_jump_example,
    pushforward,
    ridge_example,
    validate_rogers,
)
from maxcoupling.cost import running_max
from maxcoupling.errors import NotCentered, RidgeUnavailable
from maxcoupling.optimizer import BARYCENTER_CAPPED, FLOOR, RIDGE

from conftest import centered_measures


def test_ridge_example_uniform_pieces():
    mu = discretize_uniform(-1, 1, 100)
    g = optimal_map(mu, ridge_example()).targets
    x = mu.x
    np.testing.assert_allclose(g[x < -0.5], 0.0, atol=1e-15)
    mid = (x >= -0.5) & (x <= 0)
    np.testing.assert_allclose(g[mid], x[mid] + 0.5, atol=1e-12)
    top = x > 0
    assert np.max(np.abs(g[top] - (1 + x[top]) / 2)) <= 1 / 100
    np.testing.assert_allclose(g[top], barycenter(mu).values[top])


def test_ay_cost_gives_barycenter(mu3):
    m = optimal_map(mu3, ay_example())
    np.testing.assert_array_equal(m.targets, barycenter(mu3).values)
    assert set(m.regimes) == {BARYCENTER_CAPPED}


def test_pure_jump_cost_gives_floor(mu3):
    m = optimal_map(mu3, pure_jump_example())
    np.testing.assert_array_equal(m.targets, np.maximum(mu3.x, 0))
    assert set(m.regimes) == {FLOOR}


def test_pushforward_examples(mu2, mu3):
    single = build_measure([(0, 1)])
    assert pushforward(optimal_map(single, hk_example())).atoms == [(0.0, 0.0, 1.0)]
    assert pushforward(optimal_map(mu2, pure_jump_example())).atoms == [(-1.0, 0.0, 0.5), (1.0, 1.0, 0.5)]
    got = pushforward(optimal_map(mu3, ay_example())).atoms
    assert got == pytest.approx([(-2.0, 0.0, 0.25), (0.0, 2 / 3, 0.5), (2.0, 2.0, 0.25)])


def test_optimal_value_examples(mu2):
    assert optimal_value(mu2, pure_jump_example()) == pytest.approx(-0.5)
    single = build_measure([(0, 1)])
    assert optimal_value(single, ay_example()) == 0.0


def test_not_centered():
    with pytest.raises(NotCentered):
        optimal_map(build_measure([(1, 1)]), ay_example())


def test_ridge_unavailable(mu3):
    wavy = CostFunction(lambda w, s: np.sin(8 * s), None, None, "wavy")
    with pytest.raises(RidgeUnavailable):
        optimal_map(mu3, wavy)


def test_numeric_ridge_matches_declared():
    mu = discretize_uniform(-1, 1, 40)
    R = ridge_example(0.8, 0.3)
    undeclared = CostFunction(R.evaluator, R.s_derivative, None, "undeclared")
    a = optimal_map(mu, R).targets
    b = optimal_map(mu, undeclared).targets
    np.testing.assert_allclose(a, b, atol=1e-8)


def test_regime_bookkeeping():
    mu = discretize_uniform(-1, 1, 100)
    m = optimal_map(mu, ridge_example())
    counts = m.regime_counts()
    assert sum(counts.values()) == 100 and all(counts[k] > 0 for k in (BARYCENTER_CAPPED, RIDGE, FLOOR))
    floor = np.maximum(mu.x, 0)
    cap = barycenter(mu).values
    for i, r in enumerate(m.regimes):
        if r == FLOOR:
            assert m.ridge[i] <= floor[i]
        if r == BARYCENTER_CAPPED:
            assert max(m.ridge[i], floor[i]) >= cap[i]


COSTS = {
    "ay": ay_example(),
    "pure_jump": pure_jump_example(),
    "ridge": ridge_example(),
    "ridge_steep": ridge_example(2.0, 0.1),
    "running_max": running_max(),
}


@settings(max_examples=60, deadline=None)
@given(centered_measures(), st.sampled_from(sorted(COSTS)))
def test_pushforward_feasible_and_monotone(mu, name):
    F = COSTS[name]
    m = optimal_map(mu, F)
    assert np.all(np.diff(m.targets) >= 0)
    floor = np.maximum(mu.x, 0)
    assert np.all(m.targets >= floor) and np.all(m.targets <= barycenter(mu).values + 1e-15)
    pi = pushforward(m)
    assert validate_rogers(pi).ok
    assert optimal_value(mu, F) == expected_cost(pi, F)
    if name in ("ay", "ridge", "ridge_steep"):
        assert check_monotone_support(pi)
        assert check_cyclical_monotonicity(pi, F, 3)
