"""Unconstrained last passage percolation on a point cloud.

The partial order is the weak coordinatewise one. With points sorted by
(x, then y), a chain is exactly a subsequence with nondecreasing y, so the
passage time is a longest nondecreasing subsequence, found by patience
sorting in O(N log N).
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChord, InvalidEndpoint, InvalidOrder, InvalidRegion
from .geometry import ORIENT_RTOL, Point


@dataclass(frozen=True, eq=False)
class GeodesicResult:
    length: int
    u: Point
    v: Point
    xs: np.ndarray  # path vertices from u to v, endpoints included
    ys: np.ndarray

    def interior(self) -> np.ndarray:
        return np.column_stack((self.xs[1:-1], self.ys[1:-1]))


def _check_order(u, v):
    if not (u[0] <= v[0] and u[1] <= v[1]):
        raise InvalidOrder(f"endpoints must satisfy u <= v coordinatewise, got {tuple(u)} and {tuple(v)}")


def chain_depths(ys) -> np.ndarray:
    """Longest chain ending at each point (points sorted by x, then y)."""
    tails: list[float] = []
    depth = np.empty(len(ys), dtype=np.int64)
    for i, y in enumerate(ys.tolist() if isinstance(ys, np.ndarray) else ys):
        k = bisect_right(tails, y)
        if k == len(tails):
            tails.append(y)
        else:
            tails[k] = y
        depth[i] = k + 1
    return depth


def _in_rectangle(cloud, u, v) -> np.ndarray:
    xs, ys = cloud.xs, cloud.ys
    return (xs >= u[0]) & (xs <= v[0]) & (ys >= u[1]) & (ys <= v[1])


def _lis_length(ys) -> int:
    tails: list[float] = []
    for y in ys.tolist():
        k = bisect_right(tails, y)
        if k == len(tails):
            tails.append(y)
        else:
            tails[k] = y
    return len(tails)


def lpp_length(cloud, u, v) -> int:
    """Maximum number of cloud points on a directed path from u to v."""
    _check_order(u, v)
    mask = _in_rectangle(cloud, u, v)
    return _lis_length(cloud.ys[mask])


def _topmost(xs, ys, u, v) -> GeodesicResult:
    """Canonical maximizer among sorted points already restricted to [u, v].

    Backtracking from v, each step takes the optimal predecessor with the
    largest y, ties broken by the largest x.
    """
    u = Point(float(u[0]), float(u[1]))
    v = Point(float(v[0]), float(v[1]))
    depth = chain_depths(ys)
    L = int(depth.max()) if depth.size else 0
    chosen = []
    cx, cy = v
    if L:
        order = np.argsort(depth, kind="stable")
        bounds = np.searchsorted(depth[order], np.arange(1, L + 2))
        for level in range(L, 0, -1):
            members = order[bounds[level - 1]:bounds[level]]
            mx, my = xs[members], ys[members]
            ok = (mx <= cx) & (my <= cy)
            cand = members[ok]
            # largest y, then largest x
            j = np.lexsort((xs[cand], ys[cand]))[-1]
            q = int(cand[j])
            chosen.append(q)
            cx, cy = xs[q], ys[q]
    chosen.reverse()
    px = np.concatenate(([u.x], xs[chosen], [v.x]))
    py = np.concatenate(([u.y], ys[chosen], [v.y]))
    return GeodesicResult(L, u, v, px, py)


def topmost_geodesic(cloud, u, v) -> GeodesicResult:
    _check_order(u, v)
    mask = _in_rectangle(cloud, u, v)
    return _topmost(cloud.xs[mask], cloud.ys[mask], u, v)


def chord_offsets(xs, ys, u, v) -> np.ndarray:
    """Signed vertical offset of each point above the chord through u, v."""
    if u[0] == v[0]:
        raise DegenerateChord("chord through u and v is vertical")
    slope = (v[1] - u[1]) / (v[0] - u[0])
    return np.asarray(ys) - (u[1] + slope * (np.asarray(xs) - u[0]))


def transversal_fluctuation(path_xs, path_ys, u, v) -> float:
    """Largest vertical distance from a path vertex to the chord u-v."""
    off = chord_offsets(path_xs, path_ys, u, v)
    return float(np.max(np.abs(off))) if off.size else 0.0


def lpp_above_chord(cloud, u, v) -> GeodesicResult:
    """Passage time using only points on or above the chord through u, v.

    The closed half-plane above the chord is convex, so any path through
    such points stays above the chord.
    """
    _check_order(u, v)
    mask = _in_rectangle(cloud, u, v)
    xs, ys = cloud.xs[mask], cloud.ys[mask]
    off = chord_offsets(xs, ys, u, v)
    scale = max(1.0, abs(v[0] - u[0]) + abs(v[1] - u[1]))
    keep = off >= -ORIENT_RTOL * scale
    return _topmost(xs[keep], ys[keep], u, v)


def _polygon_orientation(poly: np.ndarray) -> int:
    """+1 counterclockwise, -1 clockwise; raises unless strictly convex-ish."""
    k = poly.shape[0]
    if k < 3:
        raise InvalidRegion("region needs at least 3 vertices")
    e = np.roll(poly, -1, axis=0) - poly
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = np.hypot(e[:, 0], e[:, 1]) * np.hypot(*np.roll(e, -1, axis=0).T)
    tol = ORIENT_RTOL * scale
    pos = cross > tol
    neg = cross < -tol
    if pos.any() and neg.any():
        raise InvalidRegion("region is not convex")
    if not (pos.any() or neg.any()):
        raise InvalidRegion("region is degenerate")
    # a convex polygon turns once in total
    ang = np.arctan2(cross, (e * np.roll(e, -1, axis=0)).sum(axis=1))
    if abs(abs(ang.sum()) - 2 * math.pi) > 1e-6:
        raise InvalidRegion("region is not a simple convex polygon")
    return 1 if pos.any() else -1


def _inside_convex(poly: np.ndarray, sign: int, px, py) -> np.ndarray:
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    inside = np.ones(px.shape, dtype=bool)
    k = poly.shape[0]
    for i in range(k):
        ax, ay = poly[i]
        bx, by = poly[(i + 1) % k]
        cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
        scale = math.hypot(bx - ax, by - ay) * (np.hypot(px - ax, py - ay) + 1.0)
        inside &= sign * cross >= -ORIENT_RTOL * scale
    return inside


def lpp_in_convex_region(cloud, u, v, region) -> GeodesicResult:
    """Passage time from u to v along paths that never leave a convex region."""
    _check_order(u, v)
    poly = np.asarray(region, dtype=np.float64).reshape(-1, 2)
    sign = _polygon_orientation(poly)
    ends = _inside_convex(poly, sign, [u[0], v[0]], [u[1], v[1]])
    if not ends.all():
        raise InvalidEndpoint("u and v must lie inside the region")
    mask = _in_rectangle(cloud, u, v)
    xs, ys = cloud.xs[mask], cloud.ys[mask]
    keep = _inside_convex(poly, sign, xs, ys)
    return _topmost(xs[keep], ys[keep], u, v)
