import itertools
import math

import numpy as np
import pytest

from areatrap.constrained import SolverOptions
from areatrap.errors import InvalidParameter
from areatrap.geometry import IncreasingPath, Point, trapped_area
from areatrap.lpp import topmost_geodesic
from areatrap.roughness import (
    Facet,
    RoughnessReport,
    alpha_grid,
    analyze,
    facet_angle_check,
    is_good_alpha,
    scan_good_alphas,
)
from areatrap.sampler import SeedSpec, sample_poisson_square

from conftest import cloud_of


def _diag(n=4.0):
    return IncreasingPath(n, [0, 1, 2, n], [0, 1, 2, n])


def _report(mfl, interior=True):
    f = Facet(Point(0, 0), Point(1, 1), mfl, math.pi / 4, 0.5, 0.5, interior)
    return RoughnessReport((f,), mfl, mfl if interior else 0.0, 0.0, 0.0, 0.1)


def test_diagonal_path():
    r = analyze(_diag(), 4.0, 0.0)
    assert len(r.facets) == 1
    assert r.mfl_all == pytest.approx(4 * math.sqrt(2))
    assert r.mlr_all == 0.0
    assert r.facets[0].interior and r.mfl_interior == r.mfl_all
    # the facet anchors at the corners, where the sector angles vanish
    assert r.facets[0].theta_lower == 0.0 and r.facets[0].theta_upper == 0.0


def test_diagonal_not_interior_for_positive_delta():
    for d in (1e-9, 0.3, math.pi / 4 - 1e-6):
        r = analyze(_diag(), 4.0, d)
        assert not r.facets[0].interior
        assert r.mfl_interior == 0.0 and r.mlr_interior == 0.0


def test_delta_range():
    for d in (-0.1, math.pi / 4, 1.0):
        with pytest.raises(InvalidParameter):
            analyze(_diag(), 4.0, d)


def _hull_by_cross_products(pts):
    """Vertices with every other point on or below each supporting line (brute force)."""
    keep = []
    for i, p in enumerate(pts):
        if i in (0, len(pts) - 1):
            keep.append(p)
            continue
        # p is a hull vertex iff it lies strictly above every chord from a point on its left to one on its right
        below = any(
            (q[0] - l[0]) * (p[1] - l[1]) - (q[1] - l[1]) * (p[0] - l[0]) <= 0
            for l in pts if l[0] < p[0] for q in pts if q[0] > p[0]
        )
        if not below:
            keep.append(p)
    return keep


def test_fixture_against_independent_hull():
    path = IncreasingPath(4.0, [0, 1, 3, 4], [0, 3, 3.5, 4])
    r = analyze(path, 4.0, 0.0)
    hull = _hull_by_cross_products(list(zip(path.xs.tolist(), path.ys.tolist())))
    assert hull == [(0, 0), (1, 3), (4, 4)]
    assert [(f.a, f.b) for f in r.facets] == list(zip(hull[:-1], hull[1:]))
    assert r.facets[0].euclid_length == pytest.approx(math.sqrt(10))
    assert r.facets[1].euclid_length == pytest.approx(math.sqrt(10))
    # (3, 3.5) to the line y = 3 + (x - 1)/3
    want = abs((3 - 1) / 3 + 3 - 3.5) / math.sqrt(1 + 1 / 9)
    assert r.mlr_all == pytest.approx(want)
    # anchor angles at O = (4, 0): theta_h(1,3) = pi/4, theta_v(4,4) = 0
    assert r.facets[1].theta_lower == pytest.approx(math.pi / 4)
    assert r.facets[1].theta_upper == pytest.approx(0.0)
    assert analyze(path, 4.0, math.pi / 10).interior_facets == ()


def test_interior_facet_in_the_middle():
    n = 10.0
    path = IncreasingPath(n, [0, 0.2, 1.5, 5, 8.5, 9.8, 10], [0, 1.5, 5, 8.5, 9.8, 9.9, 10])
    r = analyze(path, n, math.pi / 10)
    inner = r.interior_facets
    assert inner and all(f.theta_lower >= math.pi / 10 and f.theta_upper >= math.pi / 10 for f in inner)
    assert r.mfl_interior <= r.mfl_all and r.mlr_interior <= r.mlr_all


def test_facet_invariants_on_random_geodesics():
    for i in range(10):
        c = sample_poisson_square(30.0, SeedSpec(2, i))
        g = topmost_geodesic(c, (0, 0), (30, 30))
        r = analyze(IncreasingPath(30.0, g.xs, g.ys), 30.0, math.pi / 10)
        ang = [f.angle_to_x for f in r.facets]
        assert all(a > b for a, b in zip(ang, ang[1:]))
        assert sum(f.b.x - f.a.x for f in r.facets) == pytest.approx(30.0)
        assert sum(f.b.y - f.a.y for f in r.facets) == pytest.approx(30.0)
        assert 0 <= r.mfl_interior <= r.mfl_all and 0 <= r.mlr_interior <= r.mlr_all


def test_angle_check():
    assert facet_angle_check(analyze(_diag(), 4.0, 0.0), 0.1)
    flat = IncreasingPath(4.0, [0, 0, 4], [0, 4, 4])
    assert not facet_angle_check(analyze(flat, 4.0, 0.0), 0.1)
    horizontal = Facet(Point(1, 3), Point(3, 3), 2.0, 0.0, 0.5, 0.5, True)
    assert not facet_angle_check(RoughnessReport((horizontal,), 2.0, 2.0, 0.0, 0.0, 0.1), 0.1)


def test_good_alpha_fixtures():
    assert is_good_alpha(_report(30.0), 100, 0.05)
    assert not is_good_alpha(_report(60.0), 100, 0.05)
    at = 100 ** 0.8
    assert is_good_alpha(_report(at), 100, 0.05)
    v = is_good_alpha(_report(0.0, interior=False), 100, 0.05)
    assert v and v.vacuous
    with pytest.raises(InvalidParameter):
        is_good_alpha(_report(1.0), 100, 0.0)


def test_alpha_grid():
    assert alpha_grid(0.2, 0.3, 1).tolist() == [0.2]
    assert alpha_grid(0.2, 0.3, 3).tolist() == pytest.approx([0.2, 0.25, 0.3])
    with pytest.raises(InvalidParameter):
        alpha_grid(0.3, 0.2, 3)
    with pytest.raises(InvalidParameter):
        alpha_grid(0.2, 0.3, 0)


def test_scan_single_inactive_alpha():
    # pick a cloud whose geodesic already traps more than (1/2 + 0.01) n^2
    for i in range(100):
        c = sample_poisson_square(20.0, SeedSpec(3, i))
        g = topmost_geodesic(c, (0, 0), (20, 20))
        if trapped_area(IncreasingPath(20.0, g.xs, g.ys)) > 0.51 * 400:
            break
    res = scan_good_alphas(c, 20.0, 0.01, 0.02, 1, 0.1, math.pi / 10)
    (e,) = res.entries
    assert e.alpha == 0.01
    assert e.solution.length == g.length
    want = is_good_alpha(analyze(e.solution.path, 20.0, math.pi / 10), 20.0, 0.1)
    assert bool(e.good) == bool(want)


@pytest.mark.parametrize("mode", ["exact", "lagrangian"])
def test_scan_lengths_nonincreasing(mode):
    c = sample_poisson_square(25.0, SeedSpec(8, 1))
    res = scan_good_alphas(c, 25.0, 0.05, 0.45, 10, 0.1, math.pi / 10, SolverOptions(mode=mode))
    lens = {e.alpha: (e.solution.length if e.solution else -1) for e in res.entries}
    ordered = [lens[a] for a in sorted(lens)]
    assert all(x >= y for x, y in zip(ordered, ordered[1:]))
