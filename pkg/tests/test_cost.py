import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxcoupling import (
    CostFunction,
    ay_example,
    check_hk_ratio,
    check_supermodular,
    cross_differences,
    hk_example,
    indicator,
    indicator_variants,
    pure_jump_example,
    ridge_example,
    ridge_of,
    sample_ridge,
)
from maxcoupling.cost import CATALOGUE, running_max
from maxcoupling.errors import BadGrid, MissingDerivative, NotUnimodal

W = np.linspace(-3, 3, 61)
S = np.linspace(0, 3, 31)


def separable():
    return CostFunction(lambda w, s: w + s, lambda w, s: 1.0 + 0.0 * w, None, "separable")


def test_ay_strictly_supermodular():
    assert check_supermodular(ay_example(), W, S, strict=True)


def test_pure_jump_not_strict():
    v = check_supermodular(pure_jump_example(), [0.5, 1.0, 2.0], [0.0, 1.0, 2.0], strict=True)
    assert not v
    w1, w2, s1, s2 = v.witness
    assert w1 < w2 and s1 < s2 and v.value < 0


def test_separable_supermodular_not_strict():
    F = separable()
    assert check_supermodular(F, W, S)
    assert not check_supermodular(F, W, S, strict=True)


def test_bad_grid():
    with pytest.raises(BadGrid):
        check_supermodular(ay_example(), [0.0], S)
    with pytest.raises(BadGrid):
        check_supermodular(ay_example(), [1.0, 0.0], S)


def test_hk_example_fails_supermodularity():
    assert not check_supermodular(hk_example(), W, S)


def _exhaustive(F, w, s, strict):
    V = F(w[:, None], s[None, :])
    for i, j in itertools.combinations(range(w.size), 2):
        for k, l in itertools.combinations(range(s.size), 2):
            d = V[i, k] + V[j, l] - V[i, l] - V[j, k]
            if (d <= 1e-12) if strict else (d < -1e-12):
                return False
    return True


@settings(max_examples=40, deadline=None)
@given(
    st.sampled_from(["ay", "pure_jump", "hk", "ridge", "ind"]),
    st.lists(st.floats(-3, 3), min_size=2, max_size=10, unique=True),
    st.lists(st.floats(0, 3), min_size=2, max_size=10, unique=True),
    st.booleans(),
)
def test_adjacent_check_matches_exhaustive(name, w, s, strict):
    F = {
        "ay": ay_example(),
        "pure_jump": pure_jump_example(),
        "hk": hk_example(),
        "ridge": ridge_example(),
        "ind": indicator(0.3, 1.1),
    }[name]
    w, s = np.sort(w), np.sort(s)
    if np.any(np.diff(w) <= 1e-9) or np.any(np.diff(s) <= 1e-9):
        return
    D = cross_differences(F, w, s)
    if np.any(np.abs(np.abs(D) - 1e-12) < 1e-10):
        return  # rounding could straddle the threshold
    assert bool(check_supermodular(F, w, s, strict)) == _exhaustive(F, w, s, strict)


def test_ridge_declared_values():
    assert ridge_of(ay_example(), 0.3, 0, 2) == np.inf
    assert ridge_of(pure_jump_example(), 0.3, 0, 2) == -np.inf
    assert ridge_of(ridge_example(), 0.0, 0, 2) == 0.5


def _undeclared(F):
    return CostFunction(F.evaluator, F.s_derivative, None, F.label)


def test_ridge_search_matches_declared():
    assert ridge_of(_undeclared(ay_example()), 0.3, 0, 2) == np.inf
    assert ridge_of(_undeclared(pure_jump_example()), 0.3, 0, 2) == -np.inf
    assert ridge_of(_undeclared(ridge_example()), 0.0, 0, 2, tol=1e-10) == pytest.approx(0.5, abs=1e-9)


def test_ridge_plateau_rejected():
    with pytest.raises(NotUnimodal):
        ridge_of(_undeclared(separable()) + CostFunction(lambda w, s: -s, None), 0.0, 0, 1)


def test_ridge_two_peaks_rejected():
    F = CostFunction(lambda w, s: np.sin(6 * s), None, None, "wavy")
    with pytest.raises(NotUnimodal):
        ridge_of(F, 0.0, 0, 3)


@pytest.mark.parametrize("F", [ay_example(), ridge_example(), ridge_example(0.5, 0.2), running_max()])
def test_sampled_ridge_nondecreasing(F):
    assert sample_ridge(F, np.linspace(-2, 2, 101), 0, 3).is_nondecreasing()
    assert sample_ridge(_undeclared(F), np.linspace(-2, 2, 101), 0, 3, tol=1e-8).is_nondecreasing()


def test_hk_ratio_examples():
    grid = np.linspace(-2, 0.9, 30)
    assert check_hk_ratio(hk_example(), 1.0, grid)
    assert check_hk_ratio(ay_example(), 1.0, grid)
    flat = CostFunction(lambda w, s: 0.5 * (s - w) ** 2, lambda w, s: s - w, None, "flat")
    v = check_hk_ratio(flat, 1.0, grid)
    assert not v and v.witness[0] < v.witness[1]


def test_hk_ratio_needs_derivative():
    with pytest.raises(MissingDerivative):
        check_hk_ratio(indicator(0, 1), 1.0, [0.0, 0.5])


@pytest.mark.parametrize("a,b", [(0.0, 0.5), (-0.5, 0.0), (0.5, 1.0)])
def test_indicator_on_ridge_keeps_supermodularity_and_ridge(a, b):
    R = ridge_example()
    b = float(R.ridge(a))
    G = R + indicator(a, b)
    assert check_supermodular(G, W, S)
    # sections whose ridge lies inside the search window [max(0, w), 3]
    for w in (-0.4, a - 0.1, a, a + 0.3, 1.0):
        lo = max(0.0, w)
        if float(R.ridge(w)) <= lo:
            continue
        assert ridge_of(G, w, lo, 3.0, tol=1e-10) == pytest.approx(float(R.ridge(w)), abs=1e-8)


@pytest.mark.parametrize("F", indicator_variants(0.2, 0.7) + [indicator(0.2, 0.7)])
def test_indicator_family_supermodular(F):
    assert check_supermodular(F, W, S)


def test_indicator_closed_boundary():
    G = indicator(0.0, 1.0)
    assert G(0.0, 1.0) == 1.0 and G(-1e-12, 1.0) == 0.0 and G(0.0, 1.0 - 1e-12) == 0.0


def test_catalogue_names():
    assert set(CATALOGUE) >= {"ay_example", "pure_jump_example", "ridge_example", "indicator", "hk_example"}
