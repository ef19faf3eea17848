import math

import numpy as np
import pytest
from scipy import optimize

from areatrap.errors import InvalidInput, InvalidParameter
from areatrap.geometry import IncreasingPath, Polyline
from areatrap.limitshape import (
    LimitShape,
    J_functional,
    _f_series,
    deviation_from_limit,
    f_area,
    psi,
    psi_integral,
    psi_polyline,
    psi_scaled,
    random_competitor,
    solve_c,
    w_of,
)

ALPHAS = np.linspace(0.01, 0.49, 25)


def _f_direct(c):
    return (1 + c) / c * (1 - math.log1p(c) / c)


def test_c_at_quarter_against_brentq():
    want = optimize.brentq(lambda c: _f_direct(c) - 0.75, 0.1, 100.0, xtol=1e-14)
    c = solve_c(0.25)
    assert c == pytest.approx(want, abs=1e-8)
    assert c == pytest.approx(4.11, abs=0.02)
    assert _f_direct(4.10) < 0.75 < _f_direct(4.15)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_residual_and_identities(alpha):
    s = LimitShape.for_alpha(alpha)
    assert abs(f_area(s.c) - (0.5 + alpha)) <= 1e-10
    assert s.w == pytest.approx(math.sqrt(1 + s.c) * math.log1p(s.c) / s.c, rel=1e-12)
    assert 0 < s.w < 1


def test_c_and_w_monotone_in_alpha():
    cs = [solve_c(a) for a in ALPHAS]
    ws = [w_of(c) for c in cs]
    assert all(a < b for a, b in zip(cs, cs[1:]))
    assert all(a > b for a, b in zip(ws, ws[1:]))


def test_small_alpha_limits():
    c = solve_c(1e-6)
    assert c < 1e-4
    assert w_of(c) == pytest.approx(1.0, abs=1e-8)
    assert f_area(1e-12) == pytest.approx(0.5, abs=1e-12)


def test_series_crossover_is_smooth():
    c = 1e-4
    assert _f_series(c) == pytest.approx(_f_direct(c), rel=1e-9)


def test_w_at_tenth():
    c = solve_c(0.1)
    assert c == pytest.approx(0.836, abs=0.001)
    assert w_of(c) == pytest.approx(0.985, abs=0.001)


def test_w_domain():
    with pytest.raises(InvalidParameter):
        w_of(0.0)
    for a in (0.0, 0.5, -1.0):
        with pytest.raises(InvalidParameter):
            solve_c(a)


def test_psi_endpoints_and_domain():
    s = LimitShape.for_alpha(0.2)
    assert psi(s, 0.0) == 0.0 and psi(s, 1.0) == 1.0
    assert psi_scaled(s, 50.0, 50.0) == 50.0
    with pytest.raises(InvalidParameter):
        psi(s, 1.1)
    with pytest.raises(InvalidParameter):
        psi_scaled(s, 10.0, -0.5)


@pytest.mark.parametrize("alpha", [0.05, 0.25, 0.45])
def test_psi_area(alpha):
    assert psi_integral(LimitShape.for_alpha(alpha)) == pytest.approx(0.5 + alpha, abs=1e-8)


def test_psi_strictly_concave(rng):
    s = LimitShape.for_alpha(0.3)
    a, b = np.sort(rng.uniform(0, 1, (2, 500)), axis=0)
    keep = b - a > 1e-6
    a, b = a[keep], b[keep]
    assert np.all(psi(s, (a + b) / 2) > (psi(s, a) + psi(s, b)) / 2)


def test_J_examples():
    assert J_functional(Polyline([0, 1], [0, 1])) == 1.0
    assert J_functional(Polyline([0, 0.5, 1], [0, 1, 1])) == pytest.approx(math.sqrt(2) / 2)
    with pytest.raises(InvalidInput):
        J_functional(Polyline([0, 0.5, 1], [0, 0.8, 0.6]))


@pytest.mark.parametrize("alpha", [0.1, 0.25, 0.4])
def test_J_of_psi_is_w(alpha):
    s = LimitShape.for_alpha(alpha)
    assert J_functional(psi_polyline(s, samples=200001)) == pytest.approx(s.w, abs=1e-6)


def test_deviation_of_psi_itself():
    s = LimitShape.for_alpha(0.25)
    poly = psi_polyline(s, 100.0, 20001)
    path = IncreasingPath(100.0, poly.xs, poly.ys)
    assert deviation_from_limit(path, s, 100.0, ds=0.1) <= 0.1


def test_deviation_of_diagonal():
    s = LimitShape.for_alpha(0.25)
    n = 100.0
    x = np.linspace(0, n, 200001)
    # farthest curve point from the diagonal, perpendicular distance
    want = float(np.max((psi_scaled(s, n, x) - x) / math.sqrt(2)))
    got = deviation_from_limit(IncreasingPath(n, [0, n], [0, n]), s, n, ds=0.01)
    assert got == pytest.approx(want, abs=0.02)


def test_random_competitor_constraints(rng):
    for _ in range(200):
        phi = random_competitor(rng, 0.2)
        assert phi.xs[0] == 0 and phi.ys[0] == 0 and phi.xs[-1] == 1 and phi.ys[-1] == 1
        assert np.all(np.diff(phi.ys) >= 0)
        area = float(np.sum(0.5 * np.diff(phi.xs) * (phi.ys[:-1] + phi.ys[1:])))
        assert area >= 0.7


def test_no_competitor_beats_psi():
    rng = np.random.default_rng(7)
    worst = -math.inf
    for i in range(10_000):
        alpha = (0.05, 0.15, 0.25, 0.35, 0.45)[i % 5]
        phi = random_competitor(rng, alpha, grid=int(rng.integers(2, 48)),
                                concentration=float(rng.choice([0.3, 1.0, 5.0])))
        worst = max(worst, J_functional(phi) - LimitShape.for_alpha(alpha).w)
    assert worst <= 1e-6, f"counterexample: J - w = {worst}"
