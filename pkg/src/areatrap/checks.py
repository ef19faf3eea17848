"""Cross-validation of the fast solvers against brute-force enumeration.

Clouds are drawn with sequential trial seeds and rejected when they hold too
many points for enumeration; each accepted cloud is one instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import oracle
from .constrained import ExactProfile, LagrangianCache, SolverOptions, solve_lagrangian
from .errors import Infeasible
from .lpp import lpp_above_chord, lpp_in_convex_region, lpp_length
from .sampler import SeedSpec, SplitMix64, derive_seed, sample_poisson_square

CHECK_ALPHAS = (0.05, 0.15, 0.25, 0.35)


def small_clouds(master_seed: int, count: int, n: float, max_points: int):
    """Yield (trial_seed_index, cloud) for ``count`` clouds of at most max_points points."""
    got, i = 0, 0
    while got < count:
        cloud = sample_poisson_square(n, SeedSpec(master_seed, i))
        if cloud.count <= max_points:
            yield i, cloud
            got += 1
        i += 1
        if i > 1000 * count + 1000:
            raise RuntimeError("rejection sampling is not accepting clouds; raise max_points or lower n")


def random_endpoints(master_seed: int, index: int, n: float):
    """u <= v inside the box plus a convex kite with diagonal uv."""
    rng = SplitMix64(derive_seed(derive_seed(master_seed, index), 0x5EED))
    a, b, c, d, h1, h2 = rng.next_doubles(6)
    u = (min(a, b) * n * 0.5, min(c, d) * n * 0.5)
    v = (n * 0.5 + max(a, b) * n * 0.5, n * 0.5 + max(c, d) * n * 0.5)
    mx, my = (u[0] + v[0]) / 2, (u[1] + v[1]) / 2
    px, py = -(v[1] - u[1]), v[0] - u[0]  # perpendicular to uv
    region = [u, (mx + h1 * px, my + h1 * py), v, (mx - h2 * px, my - h2 * py)]
    return u, v, region


@dataclass
class Mismatch:
    seed_index: int
    what: str
    expected: object
    got: object


@dataclass
class LppReport:
    instances: int = 0
    agree: dict = field(default_factory=lambda: {"lpp": 0, "above_chord": 0, "convex_region": 0})
    mismatches: list = field(default_factory=list)


def check_lpp(master_seed: int, count: int, n: float = 3.0, max_points: int = 10) -> LppReport:
    rep = LppReport()
    for i, cloud in small_clouds(master_seed, count, n, max_points):
        rep.instances += 1
        u, v, region = random_endpoints(master_seed, i, n)
        pairs = {
            "lpp": (oracle.brute_lpp(cloud, (0.0, 0.0), (n, n)), lpp_length(cloud, (0.0, 0.0), (n, n))),
            "above_chord": (oracle.brute_above_chord(cloud, u, v), lpp_above_chord(cloud, u, v).length),
            "convex_region": (oracle.brute_in_convex_region(cloud, u, v, region),
                              lpp_in_convex_region(cloud, u, v, region).length),
        }
        for name, (want, got) in pairs.items():
            if want == got:
                rep.agree[name] += 1
            else:
                rep.mismatches.append(Mismatch(i, name, want, got))
    return rep


@dataclass
class ConstrainedReport:
    clouds: int = 0
    feasible: int = 0
    exact_agree: int = 0
    lagrangian_within_gap: int = 0
    lagrangian_gap_zero: int = 0
    dual_violations: int = 0
    area_violations: int = 0
    max_area_tie_diff: int = 0  # reported area differs from the least-area maximizer
    mismatches: list = field(default_factory=list)

    @property
    def gap_zero_fraction(self) -> float:
        return self.lagrangian_gap_zero / self.feasible if self.feasible else 1.0


def check_constrained(master_seed: int, count: int, n: float = 4.0, max_points: int = 12,
                      alphas=CHECK_ALPHAS, opts: SolverOptions | None = None) -> ConstrainedReport:
    opts = opts or SolverOptions(mode="lagrangian")
    rep = ConstrainedReport()
    for i, cloud in small_clouds(master_seed, count, n, max_points):
        rep.clouds += 1
        table = oracle.chain_table(cloud, n, cap=max_points)
        profile = ExactProfile(cloud, n)
        cache = LagrangianCache(cloud, n)
        for alpha in alphas:
            try:
                brute = oracle.brute_constrained(cloud, n, alpha, cap=max_points, table=table)
            except Infeasible:
                for solver in (profile.solve, lambda a: solve_lagrangian(cloud, n, a, opts, cache)):
                    try:
                        solver(alpha)
                    except Infeasible:
                        continue
                    rep.mismatches.append(Mismatch(i, f"feasibility alpha={alpha}", "infeasible", "solved"))
                continue
            rep.feasible += 1
            ex = profile.solve(alpha)
            if ex.length == brute.length:
                rep.exact_agree += 1
            else:
                rep.mismatches.append(Mismatch(i, f"exact alpha={alpha}", brute.length, ex.length))
            if ex.achieved_area != brute.least_area:
                rep.max_area_tie_diff += 1
            lg = solve_lagrangian(cloud, n, alpha, opts, cache)
            if brute.length - lg.gap <= lg.length <= brute.length:
                rep.lagrangian_within_gap += 1
            else:
                rep.mismatches.append(Mismatch(i, f"lagrangian alpha={alpha}", brute.length, (lg.length, lg.gap)))
            rep.lagrangian_gap_zero += lg.gap == 0
            T = lg.threshold
            for lam, score in lg.dual_samples:
                if brute.length > score - lam * T + 1e-9 * (1 + abs(score)):
                    rep.dual_violations += 1
            if lg.upper_bound < brute.length - 1e-9:
                rep.dual_violations += 1
            if not (lg.achieved_area >= T and ex.achieved_area >= T):
                rep.area_violations += 1
    return rep
