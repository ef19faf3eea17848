import math
import re
import warnings

import numpy as np
import pytest

from areatrap.analysis import LLN_HEADER, fit_exponent, group_means, lln_csv, lln_table
from areatrap.errors import EmptyPlot, InsufficientData, InvalidParameter
from areatrap.limitshape import LimitShape
from areatrap.plots import emit_plot, exponents_svg, shape_svg

NS = [40.0, 60.0, 90.0, 135.0]


def _recs(fn, ns=NS, per=3):
    return [{"n": n, "v": fn(n, k), "status": "solved"} for n in ns for k in range(per)]


def test_exact_power_law():
    fit = fit_exponent(_recs(lambda n, k: 3 * n ** 0.75), "v")
    assert fit.slope == pytest.approx(0.75, abs=1e-12)
    assert math.exp(fit.intercept) == pytest.approx(3.0, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.predict(100.0) == pytest.approx(3 * 100 ** 0.75)


def test_noisy_power_law():
    rng = np.random.default_rng(11)
    recs = _recs(lambda n, k: 2.0 * n ** (2 / 3) * (1 + 0.01 * rng.standard_normal()),
                 ns=[25, 50, 100, 200, 400], per=30)
    assert fit_exponent(recs, "v").slope == pytest.approx(2 / 3, abs=0.02)


def test_constant_field():
    fit = fit_exponent(_recs(lambda n, k: 5.0), "v")
    assert fit.slope == 0.0 and fit.stderr_slope == 0.0


def test_nonpositive_means_dropped():
    recs = _recs(lambda n, k: 0.0 if n == 40 else n)
    with pytest.warns(UserWarning):
        fit = fit_exponent(recs, "v")
    assert len(fit.points) == 3 and fit.slope == pytest.approx(1.0)


def test_insufficient():
    with pytest.raises(InsufficientData):
        fit_exponent(_recs(lambda n, k: n, ns=[10, 20]), "v")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(InsufficientData):
            fit_exponent(_recs(lambda n, k: 0.0 if n < 90 else n), "v")


def test_group_means_skip_blanks():
    recs = [{"n": 1.0, "v": 2.0}, {"n": 1.0, "v": None}, {"n": 1.0, "v": 4.0}]
    assert group_means(recs, "v") == {1.0: 3.0}
    with pytest.raises(InvalidParameter):
        group_means(recs, "w")


def _lln_rec(n, alpha, L, h, status="solved"):
    return {"n": n, "alpha": alpha, "L_alpha": L, "hausdorff_over_n": h, "status": status}


def test_lln_single_record():
    w = LimitShape.for_alpha(0.25).w
    (row,) = lln_table([_lln_rec(50.0, 0.25, 80, 0.1)])
    assert row.L_ratio == pytest.approx(80 / (2 * w * 50))
    assert row.hausdorff_over_n == 0.1 and row.count == 1 and row.w == w


def test_lln_two_records_by_hand():
    rows = lln_table([_lln_rec(50.0, 0.1, 90, 0.2), _lln_rec(50.0, 0.1, 94, 0.1),
                      _lln_rec(50.0, 0.1, None, None, "infeasible")])
    w = LimitShape.for_alpha(0.1).w
    (row,) = rows
    assert row.count == 2
    assert row.L_ratio == pytest.approx((90 + 94) / 2 / (2 * w * 50))
    assert row.hausdorff_over_n == pytest.approx(0.15)
    text = lln_csv(rows)
    assert text.splitlines()[0] == LLN_HEADER and len(text.splitlines()) == 2


def test_lln_w_follows_alpha():
    rows = lln_table([_lln_rec(50.0, a, 80, 0.1) for a in (0.1, 0.3)])
    assert [r.w for r in rows] == [LimitShape.for_alpha(0.1).w, LimitShape.for_alpha(0.3).w]


def test_shape_svg_curves_through_corners():
    svg = shape_svg([0.05, 0.2, 0.4])
    curves = re.findall(r'<polyline class="series" points="([^"]+)"', svg)
    assert len(curves) == 3
    frame = re.search(r'<rect x="(\d+)" y="(\d+)" width="(\d+)" height="(\d+)" fill="none"', svg)
    x0, y0, w, h = map(float, frame.groups())
    for c in curves:
        pts = [tuple(map(float, p.split(","))) for p in c.split()]
        assert pts[0] == pytest.approx((x0, y0 + h))  # (0, 0)
        assert pts[-1] == pytest.approx((x0 + w, y0))  # (1, 1)


def test_exponent_label_matches_fit():
    recs = [{"n": n, "mfl_interior": 2 * n ** 0.71, "mlr_interior": n ** 0.5,
             "tf_unconstrained": n ** 0.66} for n in NS]
    svg = exponents_svg(recs)
    for field in ("mfl_interior", "mlr_interior", "tf_unconstrained"):
        m = re.search(rf"{field}: slope (-?\d+\.\d{{3}})", svg)
        assert m and m.group(1) == f"{fit_exponent(recs, field).slope:.3f}"


def test_plots_deterministic(tmp_path):
    recs = [{"n": n, "mfl_interior": n ** 0.7 + k, "mlr_interior": n ** 0.5, "tf_unconstrained": n ** 0.6,
             "alpha": 0.25, "L_alpha": int(1.5 * n), "hausdorff_over_n": 0.1, "status": "solved"}
            for n in NS for k in range(2)]
    for kind, data in (("shape", [0.1, 0.3]), ("exponents", recs), ("lln", recs)):
        a = emit_plot(data, kind, tmp_path / f"{kind}1.svg").read_bytes()
        b = emit_plot(data, kind, tmp_path / f"{kind}2.svg").read_bytes()
        assert a == b and a.startswith(b"<svg")


def test_empty_plot(tmp_path):
    for kind in ("shape", "exponents", "lln"):
        with pytest.raises(EmptyPlot):
            emit_plot([], kind, tmp_path / "x.svg")
    with pytest.raises(InvalidParameter):
        emit_plot([0.1], "pie", tmp_path / "x.svg")
