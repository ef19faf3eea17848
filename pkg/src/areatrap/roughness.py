"""Facet and roughness statistics of a path's least concave majorant.

Anchor angles are measured at O = (n, 0). A facet [a, b] (a left of b) is
delta-interior when the whole facet sits inside the sector of rays from O
that stay at least delta away from both corners (0,0) and (n,n):

    theta_lower = angle between Oa and the horizontal   (small near (0,0))
    theta_upper = angle between Ob and the vertical     (small near (n,n))
    interior   <=> min(theta_lower, theta_upper) >= delta

Along the majorant the angle of O->point to the horizontal grows from 0 at
(0,0) to pi/2 at (n,n), so the interior facets form one contiguous run.
Every facet touching (0,0) or (n,n) has a zero angle there and is interior
only for delta = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constrained import (
    ConstrainedSolution,
    ExactProfile,
    LagrangianCache,
    SolverOptions,
    _floor_bound,
    solve_constrained,
)
from .errors import Infeasible, InvalidParameter
from .geometry import IncreasingPath, Point, anchor_angles, least_concave_majorant, vertex_roughness


@dataclass(frozen=True)
class Facet:
    a: Point
    b: Point
    euclid_length: float
    angle_to_x: float
    theta_lower: float
    theta_upper: float
    interior: bool


@dataclass(frozen=True)
class RoughnessReport:
    facets: tuple[Facet, ...]
    mfl_all: float
    mfl_interior: float
    mlr_all: float
    mlr_interior: float
    delta: float

    @property
    def interior_facets(self) -> tuple[Facet, ...]:
        return tuple(f for f in self.facets if f.interior)


def _vertex_index(path: IncreasingPath, p: Point, last: bool) -> int:
    hits = np.flatnonzero((path.xs == p.x) & (path.ys == p.y))
    return int(hits[-1] if last else hits[0])


def analyze(path: IncreasingPath, n: float, delta: float) -> RoughnessReport:
    if not (0.0 <= delta < math.pi / 4):
        raise InvalidParameter(f"delta must lie in [0, pi/4), got {delta!r}")
    n = float(n)
    hull = least_concave_majorant(path)
    corners = hull.points()
    facets = []
    for a, b in zip(corners[:-1], corners[1:]):
        _, th_lower = anchor_angles(a, n)
        th_upper, _ = anchor_angles(b, n)
        dx, dy = b.x - a.x, b.y - a.y
        facets.append(Facet(
            a, b, math.hypot(dx, dy), math.atan2(dy, dx), th_lower, th_upper,
            min(th_lower, th_upper) >= delta,
        ))

    rough = vertex_roughness(path, hull)  # interior vertices, index i -> vertex i + 1
    mlr_all = float(rough.max()) if rough.size else 0.0
    inner = [f for f in facets if f.interior]
    if inner:
        i0 = _vertex_index(path, inner[0].a, last=False)
        i1 = _vertex_index(path, inner[-1].b, last=True)
        # roughness array omits the two endpoints, which lie on the majorant
        seg = rough[max(i0 - 1, 0):max(i1, 0)]
        mlr_interior = float(seg.max()) if seg.size else 0.0
        mfl_interior = max(f.euclid_length for f in inner)
    else:
        mlr_interior = mfl_interior = 0.0
    return RoughnessReport(
        tuple(facets),
        max(f.euclid_length for f in facets),
        mfl_interior,
        mlr_all,
        mlr_interior,
        float(delta),
    )


def facet_angle_check(report: RoughnessReport, omega: float) -> bool:
    """Every interior facet makes an angle with the x-axis in (omega, pi/2 - omega)."""
    return all(omega < f.angle_to_x < math.pi / 2 - omega for f in report.interior_facets)


@dataclass(frozen=True)
class GoodCheck:
    """Outcome of the (n, eps, delta)-good test; truthy when good."""

    good: bool
    vacuous: bool  # no interior facets, good by the empty-max convention
    mfl_interior: float
    threshold: float

    def __bool__(self):
        return self.good


def is_good_alpha(report: RoughnessReport, n: float, epsilon: float) -> GoodCheck:
    if not epsilon > 0:
        raise InvalidParameter(f"epsilon must be positive, got {epsilon!r}")
    limit = float(n) ** (0.75 + epsilon)
    vacuous = not report.interior_facets
    return GoodCheck(vacuous or report.mfl_interior <= limit, vacuous, report.mfl_interior, limit)


def with_better_path(sol: ConstrainedSolution, path: IncreasingPath, area: float) -> ConstrainedSolution:
    """Replace a Lagrangian answer by a longer path known feasible at the same alpha."""
    return ConstrainedSolution(
        sol.alpha, sol.threshold, path.length, path, area, sol.upper_bound,
        max(0, _floor_bound(sol.upper_bound) - path.length), sol.method,
        dual_samples=sol.dual_samples, dual_bound=sol.dual_bound,
    )


@dataclass(frozen=True)
class ScanEntry:
    alpha: float
    status: str  # "solved" or "infeasible"
    solution: ConstrainedSolution | None
    report: RoughnessReport | None
    good: GoodCheck | None


@dataclass(frozen=True)
class ScanResult:
    entries: tuple[ScanEntry, ...]

    @property
    def good_alphas(self) -> list[float]:
        return [e.alpha for e in self.entries if e.good]

    @property
    def nonempty(self) -> bool:
        return bool(self.good_alphas)


def alpha_grid(alpha_lo: float, alpha_hi: float, grid_count: int) -> np.ndarray:
    if not (0.0 < alpha_lo < alpha_hi < 0.5):
        raise InvalidParameter("need 0 < alpha_lo < alpha_hi < 1/2")
    if grid_count < 1:
        raise InvalidParameter("grid_count must be >= 1")
    if grid_count == 1:
        return np.array([alpha_lo])
    return np.linspace(alpha_lo, alpha_hi, grid_count)


def scan_good_alphas(cloud, n, alpha_lo, alpha_hi, grid_count, epsilon, delta,
                     opts: SolverOptions | None = None) -> ScanResult:
    """Solve on one cloud across an alpha grid and test each answer for goodness.

    The grid is walked from the largest alpha down. A path feasible at a
    larger alpha is feasible at every smaller one, so the scan carries the
    longest path seen and never reports a shorter one; lengths are therefore
    nonincreasing in alpha even for the heuristic solver.
    """
    opts = opts or SolverOptions()
    grid = alpha_grid(alpha_lo, alpha_hi, grid_count)
    mode = opts.mode
    if mode == "auto":
        mode = "exact" if cloud.count <= opts.exact_cap else "lagrangian"
    profile = ExactProfile(cloud, n, opts.exact_cap) if mode == "exact" else None
    cache = LagrangianCache(cloud, n) if mode == "lagrangian" else None
    run = SolverOptions(mode, opts.lambda_max, opts.lambda_tol, opts.max_bisect,
                        opts.exact_cap, opts.kbest, opts.kbest_cap)

    entries = []
    carried = None  # (path, area) of the longest path found at a larger alpha
    for alpha in grid[::-1]:
        alpha = float(alpha)
        try:
            sol = solve_constrained(cloud, n, alpha, run, cache=cache, profile=profile)
        except Infeasible:
            entries.append(ScanEntry(alpha, "infeasible", None, None, None))
            continue
        if carried is not None and carried[0].length > sol.length:
            sol = with_better_path(sol, *carried)
        if carried is None or sol.length > carried[0].length:
            carried = (sol.path, sol.achieved_area)
        rep = analyze(sol.path, n, delta)
        entries.append(ScanEntry(alpha, "solved", sol, rep, is_good_alpha(rep, n, epsilon)))
    entries.reverse()
    lengths = [e.solution.length for e in entries if e.solution is not None]
    assert all(x >= y for x, y in zip(lengths, lengths[1:])), "lengths must not increase with alpha"
    return ScanResult(tuple(entries))
