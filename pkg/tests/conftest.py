import numpy as np
import pytest
from hypothesis import strategies as st

from maxcoupling import build_measure

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture
def mu2():
    return build_measure([(-1, 0.5), (1, 0.5)])


@pytest.fixture
def mu3():
    return build_measure([(-2, 0.25), (0, 0.5), (2, 0.25)])


@pytest.fixture
def record():
    """Store a one-line verdict for the acceptance summary."""

    def _record(number: int, ok: bool, detail: str):
        _ACCEPTANCE[number] = ("PASS" if ok else "FAIL", detail)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        verdict, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {detail}")


def centered_from(x, w):
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    w = w / w.sum()
    return build_measure(zip(x - np.dot(x, w), w))


@st.composite
def centered_measures(draw, max_atoms=8, min_atoms=1):
    n = draw(st.integers(min_atoms, max_atoms))
    xs = draw(st.lists(st.integers(-40, 40), min_size=n, max_size=n, unique=True))
    ws = draw(st.lists(st.integers(1, 20), min_size=n, max_size=n))
    return centered_from(np.array(xs) / 10.0, ws)


def random_centered(rng, max_atoms=8):
    n = int(rng.integers(2, max_atoms + 1))
    x = rng.choice(np.arange(-30, 31), size=n, replace=False) / 10.0
    return centered_from(x, rng.uniform(0.2, 1.0, size=n))


def crossed_configuration(rng, max_atoms=8):
    """A Rogers-feasible coupling with a crossed pair, plus the pair and a swap mass.

    Start from the midway graph g = (max(0, x) + beta(x)) / 2, which has slack
    in every tail constraint, then cross two atoms by a mass small enough to
    stay feasible.
    """
    from maxcoupling import Coupling, barycenter, make_coupling, validate_rogers

    while True:
        mu = random_centered(rng, max_atoms)
        beta = barycenter(mu).values
        floor = np.maximum(mu.x, 0.0)
        g = np.maximum(0.5 * (floor + beta), floor)
        pairs = [
            (i, j)
            for i in range(mu.n_atoms)
            for j in range(i + 1, mu.n_atoms)
            if g[i] >= mu.x[j] and g[j] > g[i]
        ]
        if not pairs:
            continue
        i, j = pairs[int(rng.integers(len(pairs)))]
        base = Coupling(mu.x, g, mu.p)
        m = min(mu.p[i], mu.p[j]) * float(rng.uniform(0.2, 1.0))
        for _ in range(60):
            trip = list(zip(mu.x, g, mu.p))
            trip[i] = (mu.x[i], g[i], mu.p[i] - m)
            trip[j] = (mu.x[j], g[j], mu.p[j] - m)
            trip += [(mu.x[i], g[j], m), (mu.x[j], g[i], m)]
            pi = make_coupling(trip)
            if validate_rogers(pi).ok:
                p1, p2 = (float(mu.x[i]), float(g[j])), (float(mu.x[j]), float(g[i]))
                return pi, p1, p2, m * float(rng.uniform(0.1, 1.0)), base
            m *= 0.5


def lift_base():
    """Feasible coupling with atoms at (0, 2) and (0.5, 1) for the lift geometry."""
    from maxcoupling import make_coupling

    a, b, c = 0.1, 0.2, 0.25
    x_neg = -(0.5 * b + 3 * c) / (1 - a - b - c)
    return make_coupling([(0.0, 2.0, a), (0.5, 1.0, b), (3.0, 3.0, c), (x_neg, 0.0, 1 - a - b - c)])
