"""Aggregation of trial records: power-law fits and law-of-large-numbers tables."""

from __future__ import annotations

import math
import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass, is_dataclass

import numpy as np
from scipy import stats

from .errors import InsufficientData, InvalidParameter
from .limitshape import LimitShape


def _as_dict(rec) -> dict:
    if isinstance(rec, dict):
        return rec
    if is_dataclass(rec):
        return asdict(rec)
    raise InvalidParameter(f"cannot read record of type {type(rec).__name__}")


@dataclass(frozen=True)
class ExponentFit:
    field: str
    points: tuple[tuple[float, float], ...]  # (ln n, ln mean)
    slope: float
    intercept: float
    stderr_slope: float
    r_squared: float

    def predict(self, n: float) -> float:
        return math.exp(self.intercept) * n ** self.slope


def group_means(records, field: str, group_by: str = "n") -> dict[float, float]:
    """Mean of ``field`` per group value, skipping blank (None) or non-finite entries."""
    acc: dict[float, list[float]] = defaultdict(list)
    for rec in records:
        d = _as_dict(rec)
        if field not in d:
            raise InvalidParameter(f"records have no field {field!r}")
        v = d[field]
        if v is None or not math.isfinite(v):
            continue
        acc[float(d[group_by])].append(float(v))
    return {k: float(np.mean(v)) for k, v in sorted(acc.items())}


def fit_exponent(records, field: str, group_by: str = "n") -> ExponentFit:
    """OLS of ln(mean field) on ln(group value)."""
    means = group_means(records, field, group_by)
    pts = []
    for n, m in means.items():
        if m > 0 and n > 0:
            pts.append((math.log(n), math.log(m)))
        else:
            warnings.warn(f"{field}: dropping {group_by}={n!r} with nonpositive mean {m!r}", stacklevel=2)
    if len(pts) < 3:
        raise InsufficientData(f"{field}: need at least 3 groups with positive means, have {len(pts)}")
    x = np.array([p[0] for p in pts])
    y = np.array([p[1] for p in pts])
    if np.ptp(y) == 0.0:
        # linregress reports nan r for a flat response
        return ExponentFit(field, tuple(pts), 0.0, float(y[0]), 0.0, 1.0)
    res = stats.linregress(x, y)
    return ExponentFit(field, tuple(pts), float(res.slope), float(res.intercept),
                       float(res.stderr), float(res.rvalue ** 2))


LLN_HEADER = "n,alpha,count,L_ratio,hausdorff_over_n"


@dataclass(frozen=True)
class LLNRow:
    n: float
    alpha: float
    count: int
    L_ratio: float  # mean of L_alpha / (2 w_alpha n)
    hausdorff_over_n: float
    w: float


def lln_table(records) -> list[LLNRow]:
    groups: dict[tuple[float, float], list[dict]] = defaultdict(list)
    for rec in records:
        d = _as_dict(rec)
        if d.get("status") == "solved":
            groups[(float(d["n"]), float(d["alpha"]))].append(d)
    rows = []
    for (n, alpha), ds in sorted(groups.items()):
        w = LimitShape.for_alpha(alpha).w
        ratios = [d["L_alpha"] / (2.0 * w * n) for d in ds]
        haus = [d["hausdorff_over_n"] for d in ds]
        rows.append(LLNRow(n, alpha, len(ds), float(np.mean(ratios)), float(np.mean(haus)), w))
    return rows


def lln_csv(rows: list[LLNRow]) -> str:
    lines = [LLN_HEADER]
    for r in rows:
        lines.append(f"{r.n!r},{r.alpha!r},{r.count},{r.L_ratio!r},{r.hausdorff_over_n!r}")
    return "\n".join(lines) + "\n"
