"""First-order theory of the constrained geodesic.

For alpha in (0, 1/2) the constant c = c_alpha > 0 solves

    f(c) = (1 + c)/c * (1 - ln(1 + c)/c) = 1/2 + alpha,

the limit curve is psi(x) = (1 + c) x / (1 + c x) on [0, 1] and the length
constant is w = sqrt(1 + c) ln(1 + c) / c, so that L_alpha ~ 2 w n.

f increases from 1/2 (c -> 0) to 1 (c -> inf). Both f and w lose digits to
cancellation for small c, so below ``SERIES_CUTOFF`` they are evaluated from
their Taylor series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidInput, InvalidParameter
from .geometry import IncreasingPath, Polyline, hausdorff_distance

SERIES_CUTOFF = 1e-4
SERIES_TERMS = 6
ROOT_TOL = 1e-10


def _f_series(c: float) -> float:
    # f(c) = 1/2 + sum_{k>=1} (-1)^(k-1) c^k / ((k+1)(k+2))
    s = 0.0
    for k in range(SERIES_TERMS, 0, -1):
        s = s * c + (-1.0) ** (k - 1) / ((k + 1) * (k + 2))
    return 0.5 + c * s


def f_area(c: float) -> float:
    """Area under psi for parameter c; f(0) = 1/2 by continuity."""
    if c < 0:
        raise InvalidParameter(f"c must be >= 0, got {c!r}")
    if c < SERIES_CUTOFF:
        return _f_series(c)
    return (1.0 + c) / c * (1.0 - math.log1p(c) / c)


def _log_ratio_series(c: float) -> float:
    # ln(1 + c)/c = sum_{j>=0} (-1)^j c^j / (j + 1)
    s = 0.0
    for j in range(SERIES_TERMS - 1, -1, -1):
        s = s * c + (-1.0) ** j / (j + 1)
    return s


def w_of(c: float) -> float:
    if not c > 0:
        raise InvalidParameter(f"c must be > 0, got {c!r}")
    if c < SERIES_CUTOFF:
        ratio = _log_ratio_series(c)
    else:
        ratio = math.log1p(c) / c
    return math.sqrt(1.0 + c) * ratio


def _check_alpha(alpha):
    if not (0.0 < alpha < 0.5):
        raise InvalidParameter(f"alpha must lie in (0, 1/2), got {alpha!r}")


def solve_c(alpha: float) -> float:
    """Root of f(c) = 1/2 + alpha by bisection."""
    _check_alpha(alpha)
    target = 0.5 + alpha
    lo, hi = 1e-8, 1.0
    while f_area(lo) > target:
        lo *= 0.5
        if lo < 1e-300:
            raise InvalidParameter(f"alpha {alpha!r} too small to resolve c")
    while f_area(hi) < target:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise InvalidParameter(f"alpha {alpha!r} too close to 1/2 to resolve c")
    c = 0.5 * (lo + hi)
    for _ in range(2000):
        c = 0.5 * (lo + hi)
        r = f_area(c) - target
        if r == 0.0 or not (lo < c < hi):
            break
        if r < 0:
            lo = c
        else:
            hi = c
    # take whichever bracket end or midpoint has the smallest residual
    c = min((lo, c, hi), key=lambda t: abs(f_area(t) - target))
    if abs(f_area(c) - target) > ROOT_TOL:
        raise ArithmeticError(f"root residual above {ROOT_TOL} at alpha={alpha!r}")
    return c


@dataclass(frozen=True)
class LimitShape:
    alpha: float
    c: float
    w: float

    @classmethod
    def for_alpha(cls, alpha: float) -> "LimitShape":
        c = solve_c(alpha)
        return cls(float(alpha), c, w_of(c))

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not self.c > 0:
            raise InvalidParameter(f"c must be > 0, got {self.c!r}")
        if abs(f_area(self.c) - (0.5 + self.alpha)) > ROOT_TOL:
            raise InvalidParameter("c does not solve the area equation for alpha")


def psi(shape: LimitShape, x):
    """(1 + c) x / (1 + c x) on [0, 1]; accepts scalars or arrays."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
        raise InvalidParameter("psi is defined on [0, 1]")
    c = shape.c
    out = (1.0 + c) * xa / (1.0 + c * xa)
    return float(out) if out.ndim == 0 else out


def psi_scaled(shape: LimitShape, n: float, x):
    """n * psi(x / n) on [0, n]."""
    if not n > 0:
        raise InvalidParameter(f"n must be positive, got {n!r}")
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > n):
        raise InvalidParameter(f"scaled psi is defined on [0, {n!r}]")
    out = n * psi(shape, np.minimum(xa / n, 1.0))
    return float(out) if np.ndim(out) == 0 else out


def psi_integral(shape: LimitShape, tol: float = 1e-10) -> float:
    """Area under psi by adaptive quadrature (scipy QUADPACK)."""
    val, _ = integrate.quad(lambda t: psi(shape, t), 0.0, 1.0, epsabs=tol, epsrel=tol)
    return float(val)


def psi_polyline(shape: LimitShape, n: float = 1.0, samples: int = 1001) -> Polyline:
    if samples < 2:
        raise InvalidParameter("need at least 2 samples")
    xs = np.linspace(0.0, n, samples)
    xs[-1] = n
    return Polyline(xs, psi_scaled(shape, n, xs))


def J_functional(phi: Polyline) -> float:
    """Integral of sqrt(phi') for a piecewise linear phi: sum of sqrt(dx * dy)."""
    dx = np.diff(phi.xs)
    dy = np.diff(phi.ys)
    if np.any(dy < 0):
        raise InvalidInput("J needs a nondecreasing function; a segment decreases")
    return float(np.sum(np.sqrt(dx * dy)))


def deviation_from_limit(path: IncreasingPath, shape: LimitShape, n: float, ds: float | None = None) -> float:
    """Hausdorff distance between the path and n * psi(./n), sampled at step ``ds``."""
    if ds is None:
        ds = n / 1000.0
    if not ds > 0:
        raise InvalidParameter(f"ds must be positive, got {ds!r}")
    samples = max(2, int(math.ceil(n / ds)) + 1)
    return hausdorff_distance(path.as_polyline(), psi_polyline(shape, n, samples), ds)


def random_competitor(rng: np.random.Generator, alpha: float, grid: int = 32,
                      concentration: float = 1.0) -> Polyline:
    """Random nondecreasing piecewise linear phi on [0, 1] with area >= 1/2 + alpha.

    Slopes on a uniform grid are Dirichlet distributed (so phi(0)=0, phi(1)=1).
    If the area falls short, phi is mixed with the upper staircase
    (0,0)-(0,1)-(1,1), whose area is 1, with the smallest weight that meets
    the constraint. The mix keeps the endpoints and monotonicity.
    """
    _check_alpha(alpha)
    inc = rng.dirichlet(np.full(grid, concentration))
    xs = np.linspace(0.0, 1.0, grid + 1)
    ys = np.concatenate(([0.0], np.cumsum(inc)))
    ys[-1] = 1.0
    area = float(np.sum(0.5 * np.diff(xs) * (ys[:-1] + ys[1:])))
    target = 0.5 + alpha
    if area < target:
        t = (target - area) / (1.0 - area)
        t = min(1.0, t * (1 + 1e-12) + 1e-15)
        # staircase as a function of x: a jump to 1 at x=0
        xs = np.concatenate(([0.0], xs))
        ys = np.concatenate(([0.0], (1.0 - t) * ys + t))
        ys[-1] = 1.0
    return Polyline(xs, ys)
