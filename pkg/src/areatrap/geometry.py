"""Planar primitives: trapped area, concave majorants, distances, anchor angles.

Coordinates are plain float64. Orientation tests use a relative tolerance
(``ORIENT_RTOL``) so that hand-built fixtures with exactly collinear points
behave predictably; Poisson clouds have no exact degeneracies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateAnchor, InvalidInput, InvalidParameter

ORIENT_RTOL = 1e-12


class Point(NamedTuple):
    x: float
    y: float


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Polyline:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs, ys = _frozen(self.xs), _frozen(self.ys)
        if xs.ndim != 1 or xs.shape != ys.shape:
            raise InvalidInput("polyline xs/ys must be 1-d arrays of equal length")
        if xs.size < 2:
            raise InvalidInput("polyline needs at least 2 points")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidInput("polyline coordinates must be finite")
        if np.any(np.diff(xs) < 0):
            raise InvalidInput("polyline x-coordinates must be nondecreasing")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def from_points(cls, points) -> "Polyline":
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        return cls(pts[:, 0], pts[:, 1])

    def __len__(self):
        return self.xs.size

    def points(self) -> list[Point]:
        return [Point(float(x), float(y)) for x, y in zip(self.xs, self.ys)]

    def __eq__(self, other):
        if not isinstance(other, Polyline):
            return NotImplemented
        return np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys)


@dataclass(frozen=True, eq=False)
class IncreasingPath:
    """Directed path from (0,0) to (n,n); ``xs``/``ys`` include both endpoints."""

    n: float
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        n = float(self.n)
        if not (n > 0 and math.isfinite(n)):
            raise InvalidInput(f"box side must be positive and finite, got {self.n!r}")
        xs, ys = _frozen(self.xs), _frozen(self.ys)
        if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
            raise InvalidInput("path needs matching 1-d coordinate arrays with both endpoints")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise InvalidInput("path coordinates must be finite")
        if xs[0] != 0.0 or ys[0] != 0.0 or xs[-1] != n or ys[-1] != n:
            raise InvalidInput("path must start at (0,0) and end at (n,n)")
        if np.any(np.diff(xs) < 0) or np.any(np.diff(ys) < 0):
            raise InvalidInput("path vertices must be coordinatewise nondecreasing")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @classmethod
    def through(cls, n: float, interior) -> "IncreasingPath":
        """Build the path visiting ``interior`` points (already in order)."""
        pts = np.asarray(interior, dtype=np.float64).reshape(-1, 2)
        n = float(n)
        xs = np.concatenate(([0.0], pts[:, 0], [n]))
        ys = np.concatenate(([0.0], pts[:, 1], [n]))
        return cls(n, xs, ys)

    @property
    def length(self) -> int:
        return self.xs.size - 2

    def interior(self) -> np.ndarray:
        return np.column_stack((self.xs[1:-1], self.ys[1:-1]))

    def as_polyline(self) -> Polyline:
        return Polyline(self.xs, self.ys)

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if not isinstance(other, IncreasingPath):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )


def segment_area(x0: float, y0: float, x1: float, y1: float) -> float:
    """Area under one path segment. The DP kernels use this exact expression."""
    return 0.5 * ((x1 - x0) * (y0 + y1))


def polyline_area(xs: Sequence[float], ys: Sequence[float]) -> float:
    # Sequential left-to-right accumulation so that DP-accumulated areas
    # reproduce this value bit for bit.
    total = 0.0
    for i in range(len(xs) - 1):
        total += 0.5 * ((xs[i + 1] - xs[i]) * (ys[i] + ys[i + 1]))
    return total


def trapped_area(path: IncreasingPath) -> float:
    """Area between the path, the x-axis and the vertical segment at x = n."""
    return polyline_area(path.xs.tolist(), path.ys.tolist())


def _cross(ox, oy, ax, ay, bx, by):
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _nonright_turn(ox, oy, ax, ay, bx, by) -> bool:
    # True for a left turn or (within tolerance) collinear.
    c = _cross(ox, oy, ax, ay, bx, by)
    scale = math.hypot(ax - ox, ay - oy) * math.hypot(bx - ox, by - oy)
    return c >= -ORIENT_RTOL * scale


def upper_hull(xs, ys) -> tuple[list[float], list[float]]:
    """Monotone-chain upper hull; collinear points are dropped."""
    order = sorted(range(len(xs)), key=lambda i: (xs[i], ys[i]))
    hx: list[float] = []
    hy: list[float] = []
    for i in order:
        px, py = float(xs[i]), float(ys[i])
        if hx and hx[-1] == px and hy[-1] == py:
            continue
        while len(hx) >= 2 and _nonright_turn(hx[-2], hy[-2], hx[-1], hy[-1], px, py):
            hx.pop()
            hy.pop()
        hx.append(px)
        hy.append(py)
    return hx, hy


def least_concave_majorant(path: IncreasingPath) -> Polyline:
    hx, hy = upper_hull(path.xs.tolist(), path.ys.tolist())
    return Polyline(hx, hy)


def is_concave(poly: Polyline) -> bool:
    xs, ys = poly.xs, poly.ys
    for i in range(1, xs.size - 1):
        c = _cross(xs[i - 1], ys[i - 1], xs[i], ys[i], xs[i + 1], ys[i + 1])
        scale = math.hypot(xs[i] - xs[i - 1], ys[i] - ys[i - 1]) * math.hypot(
            xs[i + 1] - xs[i], ys[i + 1] - ys[i]
        )
        if c > ORIENT_RTOL * scale:
            return False
    return True


def point_polyline_distance(px, py, poly: Polyline, chunk: int = 4096) -> np.ndarray:
    """Exact Euclidean distance from each query point to the polyline."""
    px = np.atleast_1d(np.asarray(px, dtype=np.float64))
    py = np.atleast_1d(np.asarray(py, dtype=np.float64))
    ax, ay = poly.xs[:-1], poly.ys[:-1]
    dx, dy = poly.xs[1:] - ax, poly.ys[1:] - ay
    len2 = dx * dx + dy * dy
    safe = np.where(len2 > 0, len2, 1.0)
    out = np.empty(px.size)
    step = max(1, chunk * 64 // max(1, ax.size))
    for s in range(0, px.size, step):
        qx = px[s:s + step, None]
        qy = py[s:s + step, None]
        t = ((qx - ax) * dx + (qy - ay) * dy) / safe
        t = np.clip(np.where(len2 > 0, t, 0.0), 0.0, 1.0)
        ex = qx - (ax + t * dx)
        ey = qy - (ay + t * dy)
        out[s:s + step] = np.sqrt(np.min(ex * ex + ey * ey, axis=1))
    return out


def vertex_roughness(path: IncreasingPath, majorant: Polyline) -> np.ndarray:
    """Distance from every interior path vertex to the majorant.

    Only vertices are inspected: distance to a convex set is convex along each
    path segment, so its maximum over a segment sits at an endpoint.
    """
    if path.length == 0:
        return np.zeros(0)
    d = point_polyline_distance(path.xs[1:-1], path.ys[1:-1], majorant)
    # vertices that are hull corners are exactly on the majorant
    d[d < 1e-12 * path.n] = 0.0
    return d


def sample_polyline(poly: Polyline, ds: float) -> tuple[np.ndarray, np.ndarray]:
    """Points along the polyline with arc-length spacing at most ``ds``."""
    if not ds > 0:
        raise InvalidParameter(f"sampling step must be positive, got {ds!r}")
    xs, ys = poly.xs, poly.ys
    seg = np.hypot(np.diff(xs), np.diff(ys))
    k = np.maximum(1, np.ceil(seg / ds).astype(np.int64))
    out_x = [np.array([xs[0]])]
    out_y = [np.array([ys[0]])]
    for i in range(seg.size):
        t = np.arange(1, k[i] + 1) / k[i]
        out_x.append(xs[i] + t * (xs[i + 1] - xs[i]))
        out_y.append(ys[i] + t * (ys[i + 1] - ys[i]))
    return np.concatenate(out_x), np.concatenate(out_y)


def directed_hausdorff(a: Polyline, b: Polyline, ds: float) -> float:
    sx, sy = sample_polyline(a, ds)
    return float(np.max(point_polyline_distance(sx, sy, b)))


def hausdorff_distance(a: Polyline, b: Polyline, ds: float) -> float:
    """Symmetric Hausdorff distance, accurate to within ``ds``."""
    if not ds > 0:
        raise InvalidParameter(f"sampling step must be positive, got {ds!r}")
    return max(directed_hausdorff(a, b, ds), directed_hausdorff(b, a, ds))


def anchor_angles(p, n: float) -> tuple[float, float]:
    """Acute angles of the ray from O=(n,0) to ``p``: (to vertical, to horizontal)."""
    vx = float(p[0]) - n
    vy = float(p[1])
    if vx == 0.0 and vy == 0.0:
        raise DegenerateAnchor(f"point coincides with the anchor ({n!r}, 0)")
    theta_h = math.atan2(abs(vy), abs(vx))
    theta_v = math.pi / 2 - theta_h
    return theta_v, theta_h
