"""``maxcoupling`` command line.

Exit codes: 0 ok, 2 input error, 3 validation failure, 4 solver limit.
Reports are JSON on stdout (or under ``--out``); bulk data is CSV/TSV.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .barycenter import barycenter, max_law
from .cost import CATALOGUE, CostFunction, indicator, ridge_example
from .coupling import (
    check_monotone_support,
    expected_cost,
    hk_lift,
    make_coupling,
    swap_competitor,
    swap_gain,
    validate_rogers,
)
from .errors import (
    BadInterval,
    EmptyMeasure,
    IterationLimit,
    MaxCouplingError,
    NonFinite,
    ParseError,
    RidgeUnavailable,
    SolverFailure,
    TooFewQuotes,
)
from .lp import build_lp, default_y_grid, solve_lp
from .measure import build_measure, breeden_litzenberger
from .optimizer import optimal_map, optimal_value, pushforward
from .simulate import WalkConfig, empirical_survival, ks_distance, simulate_ay, snap_to_lattice, terminal_ks

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_SOLVER = 0, 2, 3, 4
INPUT_ERRORS = (ParseError, EmptyMeasure, NonFinite, TooFewQuotes, BadInterval)

log = logging.getLogger("maxcoupling")


class Failure(Exception):
    """Report a failed check with a chosen exit code after writing output."""

    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def make_cost(args) -> CostFunction:
    """Build a catalogue cost; ``a+b`` sums several catalogue entries."""
    terms = []
    for name in args.cost.split("+"):
        name = name.strip()
        if name == "ridge_example":
            terms.append(ridge_example(args.ridge_slope, args.ridge_intercept))
        elif name == "indicator":
            if args.indicator_a is None or args.indicator_b is None:
                raise ParseError("indicator needs --indicator-a and --indicator-b")
            terms.append(indicator(args.indicator_a, args.indicator_b, args.indicator_kind))
        elif name in CATALOGUE:
            terms.append(CATALOGUE[name]())
        else:
            raise ParseError(f"unknown cost {name!r}; choose from {', '.join(sorted(CATALOGUE))}")
    F = terms[0]
    for t in terms[1:]:
        F = F + t
    return F


def load_measure(args):
    rows = io.read_measure_rows(args.measure)
    return build_measure(map(tuple, rows), args.mean_tol)


def load_coupling(args):
    rows = io.read_coupling_rows(args.coupling)
    return make_coupling(map(tuple, rows), args.tol)


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from exc
    return a, b


def _out_dir(args) -> Path | None:
    if args.out is None:
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def emit(args, report: dict, name: str) -> None:
    out = _out_dir(args)
    text = io.dumps(report)
    if out is None:
        sys.stdout.write(text)
    else:
        (out / name).write_text(text, encoding="utf-8")


def y_grid_for(mu, F, args) -> np.ndarray:
    return default_y_grid(mu, F, refine=args.ygrid)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_barycenter(args) -> int:
    mu = load_measure(args)
    if args.require_centered and not mu.centered:
        raise Failure(EXIT_INVALID, f"measure is not centered (mean {mu.mean:.6g})")
    beta = barycenter(mu)
    out = _out_dir(args)
    if out is None:
        sys.stdout.write("k\tbeta\n")
        for k, b in beta.rows():
            sys.stdout.write(f"{k!r}\t{b!r}\n")
    else:
        io.write_csv(out / "beta.tsv", ("k", "beta"), beta.rows(), sep="\t")
    if mu.centered:
        surv = max_law(mu, beta)
        if out is None:
            sys.stdout.write("\nl\tsurvival\n")
            for l, s in surv.rows():
                sys.stdout.write(f"{l!r}\t{s!r}\n")
        else:
            io.write_csv(out / "survival.tsv", ("l", "survival"), surv.rows(), sep="\t")
    return EXIT_OK


def _lp_value(mu, F, y, sense, max_iter):
    sol = solve_lp(build_lp(mu, y, F, sense), max_iter)
    if sol.status != "optimal":
        raise SolverFailure(f"LP ({sense}) ended with status {sol.status!r}")
    return sol


def cmd_price(args) -> int:
    quotes = io.read_quotes(args.quotes)
    implied = breeden_litzenberger(map(tuple, quotes), args.forward, args.mean_tol, detail=True)
    mu = implied.measure
    F = make_cost(args)
    y = y_grid_for(mu, F, args)
    hi = _lp_value(mu, F, y, "max", args.max_iter)
    lo = _lp_value(mu, F, y, "min", args.max_iter)
    try:
        closed = optimal_value(mu, F)
    except RidgeUnavailable as exc:
        log.warning("closed form unavailable: %s", exc)
        closed = None
    report = {
        "cost": F.label,
        "upper_bound": hi.value,
        "lower_bound": lo.value,
        "closed_form_upper": closed,
        "gap": None if closed is None else hi.value - closed,
        "y_grid_size": int(y.size),
        "measure_summary": {
            "n_atoms": mu.n_atoms,
            "mean": mu.mean,
            "std": mu.std(),
            "left_boundary_mass": implied.left_boundary_mass,
            "right_boundary_mass": implied.right_boundary_mass,
            "boundary_rule": implied.boundary_rule,
        },
    }
    out = _out_dir(args)
    if out is not None:
        io.write_measure(out / "implied_measure.csv", mu)
    emit(args, report, "price.json")
    return EXIT_OK


def cmd_validate(args) -> int:
    pi = load_coupling(args)
    rep = validate_rogers(pi, args.tol)
    mono = check_monotone_support(pi)
    d = rep.to_dict()
    d["monotone_support"] = bool(mono.ok)
    d["monotone_witness"] = mono.witness
    if not mono.ok:
        log.warning("support is not monotone: %s", mono.witness)
    emit(args, d, "rogers.json")
    if not rep.ok:
        raise Failure(EXIT_INVALID, "coupling violates the Rogers conditions")
    return EXIT_OK


def cmd_optimize(args) -> int:
    mu = load_measure(args)
    F = make_cost(args)
    gmap = optimal_map(mu, F)
    pi = pushforward(gmap)
    out = _out_dir(args)
    if out is not None:
        io.write_coupling(out / "coupling.csv", pi)
    report = {
        "cost": F.label,
        "value": expected_cost(pi, F),
        "regime_counts": gmap.regime_counts(),
        "ties": int(np.count_nonzero(gmap.ties)),
    }
    if out is None:
        report["coupling"] = [list(a) for a in pi.atoms]
    emit(args, report, "optimize.json")
    return EXIT_OK


def cmd_oracle(args) -> int:
    mu = load_measure(args)
    F = make_cost(args)
    y = y_grid_for(mu, F, args)
    sol = _lp_value(mu, F, y, args.sense, args.max_iter)
    d = sol.to_dict()
    d["sense"] = args.sense
    d["cost"] = F.label
    d["y_grid_size"] = int(y.size)
    out = _out_dir(args)
    if out is not None:
        io.write_coupling(out / "coupling.csv", sol.coupling)
    emit(args, d, "lp.json")
    return EXIT_OK


def cmd_simulate(args) -> int:
    mu = load_measure(args)
    if args.snap:
        mu = snap_to_lattice(mu, args.step)
    cfg = WalkConfig(args.step, args.paths, args.max_steps, args.seed)
    samples = simulate_ay(mu, cfg)
    surv = max_law(mu)
    theo = np.column_stack([surv.levels, surv.probs])
    emp = empirical_survival(samples, surv.levels)
    report = {
        "n_paths": cfg.n_paths,
        "step": cfg.step,
        "max_steps": cfg.max_steps,
        "seed": cfg.seed,
        "truncation_rate": samples.truncation_rate,
        "ks_survival": ks_distance(emp, theo),
        "ks_terminal": terminal_ks(samples, mu),
        "mean_terminal": float(samples.stopped_only()[0].mean()),
    }
    out = _out_dir(args)
    if out is not None:
        io.write_csv(
            out / "samples.csv",
            ("terminal", "running_max", "stopped"),
            ((t, s, "1" if ok else "0") for t, s, ok in zip(samples.terminal, samples.running_max, samples.stopped)),
        )
        io.write_csv(out / "survival.tsv", ("l", "survival", "theory"), np.column_stack([emp, theo[:, 1]]), sep="\t")
    emit(args, report, "simulate.json")
    return EXIT_OK


def cmd_improve(args) -> int:
    pi = load_coupling(args)
    F = make_cost(args)
    before = expected_cost(pi, F)
    if args.p1 is None or args.p2 is None or args.mass is None:
        raise ParseError("improve needs --p1, --p2 and --mass")
    report = {"op": args.op, "cost": F.label, "before": before}
    if args.op == "swap":
        new = swap_competitor(pi, args.p1, args.p2, args.mass)
        report["predicted_gain"] = swap_gain(F, args.p1, args.p2, args.mass)
    else:
        s1, s2 = args.p1[1], args.p2[1]
        q = s2 + (s1 - s2) * np.arange(1, args.qgrid + 1) / args.qgrid
        q[-1] = s1
        res = hk_lift(pi, args.p1, args.p2, args.mass, F, q)
        new = res.coupling
        report["predicted_gain"] = res.gain
        report["lowered_mass"] = res.lowered_mass
    after = expected_cost(new, F)
    rep = validate_rogers(new, args.tol)
    report.update(after=after, realized_gain=after - before, rogers_ok=rep.ok)
    out = _out_dir(args)
    if out is not None:
        io.write_coupling(out / "coupling.csv", new)
    else:
        report["coupling"] = [list(a) for a in new.atoms]
    emit(args, report, "improve.json")
    if not rep.ok:
        raise Failure(EXIT_INVALID, "improved coupling violates the Rogers conditions")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _cost_flags(p: argparse.ArgumentParser, default: str | None = "ay_example") -> None:
    p.add_argument("--cost", default=default, help="catalogue name; join several with '+'")
    p.add_argument("--ridge-slope", type=float, default=1.0)
    p.add_argument("--ridge-intercept", type=float, default=0.5)
    p.add_argument("--indicator-a", type=float)
    p.add_argument("--indicator-b", type=float)
    p.add_argument("--indicator-kind", default="ge_ge", choices=["ge_ge", "le_le", "neg_gt_lt", "neg_lt_gt"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxcoupling", description="Extremal joint laws of a martingale and its maximum.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--out", help="output directory (default: report to stdout)")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--mean-tol", type=float, default=1e-9)
        return p

    p = add("barycenter", cmd_barycenter, "barycenter and maximum law of a measure")
    p.add_argument("--measure", required=True)
    p.add_argument("--require-centered", action="store_true")

    p = add("price", cmd_price, "robust price bounds from call quotes")
    p.add_argument("--quotes", required=True)
    p.add_argument("--forward", type=float, default=0.0)
    p.add_argument("--ygrid", type=int, default=0, help="extra uniform levels added to the LP grid")
    p.add_argument("--max-iter", type=int, default=1_000_000)
    _cost_flags(p)

    p = add("validate", cmd_validate, "check a coupling against the Rogers conditions")
    p.add_argument("--coupling", required=True)

    p = add("optimize", cmd_optimize, "closed-form optimal coupling")
    p.add_argument("--measure", required=True)
    _cost_flags(p)

    p = add("oracle", cmd_oracle, "LP over the discrete Rogers polytope")
    p.add_argument("--measure", required=True)
    p.add_argument("--ygrid", type=int, default=0, help="extra uniform levels added to the LP grid")
    p.add_argument("--sense", choices=["max", "min"], default="max")
    p.add_argument("--max-iter", type=int, default=1_000_000)
    _cost_flags(p)

    p = add("simulate", cmd_simulate, "Monte Carlo of the barycenter stopping rule")
    p.add_argument("--measure", required=True)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--snap", action="store_true", help="round atoms to the lattice first")

    p = add("improve", cmd_improve, "apply a swap or lift to a coupling")
    p.add_argument("--coupling", required=True)
    p.add_argument("--op", choices=["swap", "lift"], required=True)
    p.add_argument("--p1", type=_pair, help="first atom as x,y")
    p.add_argument("--p2", type=_pair, help="second atom as x,y")
    p.add_argument("--mass", type=float)
    p.add_argument("--qgrid", type=int, default=64, help="lift levels between the two y values")
    _cost_flags(p)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if getattr(args, "tol", 1.0) <= 0 or getattr(args, "mean_tol", 1.0) <= 0:
        log.error("tolerances must be positive")
        return EXIT_INPUT
    try:
        return args.func(args)
    except Failure as exc:
        log.error("%s", exc)
        return exc.code
    except INPUT_ERRORS as exc:
        log.error("%s", exc)
        return EXIT_INPUT
    except (IterationLimit, SolverFailure) as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    except MaxCouplingError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_INVALID
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
