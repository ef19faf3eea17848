"""Brute-force ground truth on tiny clouds.

Every subset of the relevant points is tested for being a chain; paths are
the chains, so exhaustive enumeration gives exact optima. Costs 2^k, hence
the point cap (default 12, never above 20).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Infeasible, InvalidParameter, SizeCapExceeded
from .geometry import polyline_area

DEFAULT_CAP = 12
HARD_CAP = 20


def _check_cap(k, cap):
    if cap > HARD_CAP:
        raise InvalidParameter(f"oracle cap may not exceed {HARD_CAP}")
    if k > cap:
        raise SizeCapExceeded(f"{k} points exceeds the oracle cap of {cap}")


def chain_masks(xs, ys) -> np.ndarray:
    """Bitmasks (bit i = point i) of every subset forming a chain, empty set included."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    k = xs.size
    masks = np.arange(1 << k, dtype=np.int64)
    ok = np.ones(masks.size, dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            comparable = (xs[i] <= xs[j] and ys[i] <= ys[j]) or (xs[j] <= xs[i] and ys[j] <= ys[i])
            if not comparable:
                pm = (1 << i) | (1 << j)
                ok &= (masks & pm) != pm
    return masks[ok]


def _members(mask: int, order) -> list[int]:
    return [i for i in order if mask >> i & 1]


def _sorted_order(xs, ys):
    return sorted(range(len(xs)), key=lambda i: (xs[i], ys[i]))


def count_chains(xs, ys) -> int:
    """Number of nonempty chains."""
    return int(chain_masks(xs, ys).size) - 1


def _popcounts(masks: np.ndarray) -> np.ndarray:
    return np.array([bin(int(m)).count("1") for m in masks], dtype=np.int64)


def _in_rect(cloud, u, v):
    xs, ys = cloud.xs, cloud.ys
    keep = (xs >= u[0]) & (xs <= v[0]) & (ys >= u[1]) & (ys <= v[1])
    return xs[keep], ys[keep]


def brute_lpp(cloud, u, v, cap: int = DEFAULT_CAP) -> int:
    xs, ys = _in_rect(cloud, u, v)
    _check_cap(xs.size, cap)
    return int(_popcounts(chain_masks(xs, ys)).max())


def brute_above_chord(cloud, u, v, cap: int = DEFAULT_CAP) -> int:
    xs, ys = _in_rect(cloud, u, v)
    _check_cap(xs.size, cap)
    dx, dy = v[0] - u[0], v[1] - u[1]
    if dx == 0:
        raise InvalidParameter("chord through u and v is vertical")
    # cross products rather than offsets, so this is an independent formulation
    tol = 1e-12 * max(1.0, abs(dx) + abs(dy)) * dx
    above = np.array([dx * (y - u[1]) - dy * (x - u[0]) >= -tol for x, y in zip(xs, ys)], dtype=bool)
    xs, ys = xs[above], ys[above]
    return int(_popcounts(chain_masks(xs, ys)).max())


def _in_convex_fan(poly, x, y) -> bool:
    # inside iff inside one triangle of the fan from vertex 0 (barycentric test)
    ax, ay = poly[0]
    for i in range(1, len(poly) - 1):
        bx, by = poly[i]
        cx, cy = poly[i + 1]
        det = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
        if det == 0:
            continue
        l1 = ((by - cy) * (x - cx) + (cx - bx) * (y - cy)) / det
        l2 = ((cy - ay) * (x - cx) + (ax - cx) * (y - cy)) / det
        l3 = 1.0 - l1 - l2
        eps = -1e-12
        if l1 >= eps and l2 >= eps and l3 >= eps:
            return True
    return False


def brute_in_convex_region(cloud, u, v, region, cap: int = DEFAULT_CAP) -> int:
    xs, ys = _in_rect(cloud, u, v)
    _check_cap(xs.size, cap)
    poly = [tuple(map(float, p)) for p in region]
    keep = np.array([_in_convex_fan(poly, x, y) for x, y in zip(xs, ys)], dtype=bool)
    return int(_popcounts(chain_masks(xs[keep], ys[keep])).max())


def chain_table(cloud, n, cap: int = DEFAULT_CAP):
    """All chains from (0,0) to (n,n) as (length, area, vertex list)."""
    xs, ys = cloud.xs, cloud.ys
    _check_cap(xs.size, cap)
    order = _sorted_order(xs.tolist(), ys.tolist())
    out = []
    for m in chain_masks(xs, ys).tolist():
        idx = _members(m, order)
        px = [0.0] + [float(xs[i]) for i in idx] + [float(n)]
        py = [0.0] + [float(ys[i]) for i in idx] + [float(n)]
        out.append((len(idx), polyline_area(px, py), list(zip(px, py))))
    return out


@dataclass(frozen=True)
class BruteConstrained:
    length: int
    least_area: float
    greatest_area: float
    least_witness: list
    greatest_witness: list
    optimal_paths: list
    max_area: float


def brute_constrained(cloud, n, alpha, cap: int = DEFAULT_CAP, table=None) -> BruteConstrained:
    """Exact constrained optimum by enumeration, with least/greatest-area maximizers."""
    if not (0.0 < alpha < 0.5):
        raise InvalidParameter(f"alpha must lie in (0, 1/2), got {alpha!r}")
    table = chain_table(cloud, n, cap) if table is None else table
    T = (0.5 + alpha) * n * n
    max_area = max(a for _, a, _ in table)
    feas = [row for row in table if row[1] >= T]
    if not feas:
        raise Infeasible(T, max_area)
    L = max(r[0] for r in feas)
    opt = [r for r in feas if r[0] == L]
    least = min(opt, key=lambda r: r[1])
    most = max(opt, key=lambda r: r[1])
    for r in opt:
        assert least[1] <= r[1] and r[1] >= T
    return BruteConstrained(L, least[1], most[1], least[2], most[2], [r[2] for r in opt], max_area)


def brute_lagrangian(cloud, n, lam, cap: int = DEFAULT_CAP, table=None) -> float:
    """max over paths of |path| + lam * area."""
    table = chain_table(cloud, n, cap) if table is None else table
    return max(k + lam * a for k, a, _ in table)


def brute_max_area(cloud, n, cap: int = DEFAULT_CAP, table=None) -> float:
    table = chain_table(cloud, n, cap) if table is None else table
    return max(a for _, a, _ in table)
