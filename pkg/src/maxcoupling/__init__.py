"""Extremal joint laws of a martingale's terminal value and running maximum."""

from .barycenter import BarycenterFunction, InverseValue, SurvivalCurve, barycenter, inverse_barycenter, max_law
from .cost import (
    CATALOGUE,
    CostFunction,
    Ridge,
    Verdict,
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
from .coupling import (
    Coupling,
    LiftResult,
    RogersReport,
    check_cyclical_monotonicity,
    check_monotone_support,
    expected_cost,
    hk_lift,
    lift_gain_quadrature,
    lift_profile,
    make_coupling,
    swap_competitor,
    swap_gain,
    tail_sums,
    validate_rogers,
)
from .errors import *  # noqa: F401,F403
from .lp import LinearProgram, LPSolution, OracleGap, build_lp, default_y_grid, oracle_gap, solve_lp
from .measure import DiscreteMeasure, ImpliedMeasure, breeden_litzenberger, build_measure, call_prices, discretize_uniform
from .optimizer import OptimalMap, azema_yor, optimal_map, optimal_value, pure_jump, pushforward
from .simulate import (
    EmbeddingSample,
    Samples,
    WalkConfig,
    empirical_survival,
    ks_distance,
    simulate_ay,
    snap_to_lattice,
    terminal_ks,
)

__version__ = "0.1.0"
