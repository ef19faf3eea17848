"""Area-constrained longest increasing path.

Maximize the number of cloud points on an increasing path from (0,0) to
(n,n) subject to trapped area >= (1/2 + alpha) n^2.

Two solvers:

* ``exact``: g[p, l] = max area over paths ending at p with exactly l points;
  O(N^2 l_max), used up to ``exact_cap`` points.
* ``lagrangian``: maximize |path| + lambda * area. The dual bound
  min_lambda (score(lambda) - lambda * threshold) certifies the result; the
  reported ``gap`` is floor(bound) - length. On small clouds a remaining gap
  is closed by ranking paths at the best lambda (``ranked_paths``).

Both report, among the optimal lengths they find, a path of maximal area
(exact) or the best feasible candidate (lagrangian); neither resolves the
least-area tie-break.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import Infeasible, InvalidParameter, SizeCapExceeded
from .geometry import IncreasingPath, polyline_area, trapped_area
from .lpp import chain_depths

METHODS = ("lagrangian", "exact", "auto")


@dataclass(frozen=True)
class SolverOptions:
    mode: str = "auto"
    lambda_max: float | None = None  # default 4/n
    lambda_tol: float | None = None  # default 1e-6/n
    max_bisect: int = 60
    exact_cap: int = 4000
    # gap closing by path ranking; only on clouds of at most kbest_cap points
    kbest: int = 128
    kbest_cap: int = 400

    def __post_init__(self):
        if self.mode not in METHODS:
            raise InvalidParameter(f"mode must be one of {METHODS}, got {self.mode!r}")
        if self.max_bisect < 1:
            raise InvalidParameter("max_bisect must be >= 1")
        if self.exact_cap < 0:
            raise InvalidParameter("exact_cap must be >= 0")
        if self.kbest < 0 or self.kbest_cap < 0:
            raise InvalidParameter("kbest and kbest_cap must be >= 0")
        for name in ("lambda_max", "lambda_tol"):
            v = getattr(self, name)
            if v is not None and not (v > 0 and math.isfinite(v)):
                raise InvalidParameter(f"{name} must be positive, got {v!r}")


@dataclass(frozen=True, eq=False)
class LagrangianOutcome:
    lam: float
    score: float
    length: int
    area: float
    path: IncreasingPath


@dataclass(frozen=True, eq=False)
class ConstrainedSolution:
    alpha: float
    threshold: float
    length: int
    path: IncreasingPath
    achieved_area: float
    upper_bound: float
    gap: int
    method: str
    dual_samples: tuple = ()  # (lambda, score) pairs evaluated
    dual_bound: float | None = None  # min over samples of score - lambda * threshold
    area_profile: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> float:
        return self.path.n


def area_threshold(n: float, alpha: float) -> float:
    return (0.5 + alpha) * n * n


def _check_alpha(alpha):
    if not (0.0 < alpha < 0.5):
        raise InvalidParameter(f"alpha must lie in (0, 1/2), got {alpha!r}")


def _backtrack(pred, sink_pred) -> list[int]:
    out = []
    q = sink_pred
    while q >= 0:
        out.append(q)
        q = int(pred[q])
    out.reverse()
    return out


def _path(cloud, n, idx) -> IncreasingPath:
    idx = np.asarray(idx, dtype=np.int64)
    return IncreasingPath(
        n,
        np.concatenate(([0.0], cloud.xs[idx], [float(n)])),
        np.concatenate(([0.0], cloud.ys[idx], [float(n)])),
    )


def lagrangian_best(cloud, n, lam: float) -> LagrangianOutcome:
    """Maximizer of |path| + lam * area; ties go to larger area, then higher predecessors."""
    if not (lam >= 0 and math.isfinite(lam)):
        raise InvalidParameter(f"lambda must be finite and >= 0, got {lam!r}")
    _, _, pred, score, area, sink_pred = kernels.weighted_dp(cloud.xs, cloud.ys, n, 1.0, lam)
    idx = _backtrack(pred, sink_pred)
    return LagrangianOutcome(float(lam), float(score), len(idx), float(area), _path(cloud, n, idx))


def _max_area_path(cloud, n) -> tuple[float, IncreasingPath]:
    _, _, pred, score, area, sink_pred = kernels.weighted_dp(cloud.xs, cloud.ys, n, 0.0, 1.0)
    return float(area), _path(cloud, n, _backtrack(pred, sink_pred))


def max_trappable_area(cloud, n) -> float:
    """Largest area trapped by any increasing path (0,0) -> (n,n)."""
    return _max_area_path(cloud, n)[0]


class ExactProfile:
    """Per-length maximum areas for one cloud; answers any alpha."""

    def __init__(self, cloud, n, cap: int = 4000):
        if cloud.count > cap:
            raise SizeCapExceeded(f"{cloud.count} points exceeds the exact-solver cap of {cap}")
        self.cloud = cloud
        self.n = float(n)
        depth = chain_depths(cloud.ys)
        self.G, self.P, self.sink_G, self.sink_P = kernels.exact_area_dp(
            cloud.xs, cloud.ys, self.n, depth
        )

    @property
    def max_area(self) -> float:
        return float(np.max(self.sink_G))

    def path_with(self, length: int) -> IncreasingPath:
        idx = []
        q = int(self.sink_P[length])
        k = length
        while q >= 0:
            idx.append(q)
            q, k = int(self.P[q, k]), k - 1
        idx.reverse()
        return _path(self.cloud, self.n, idx)

    def solve(self, alpha: float) -> ConstrainedSolution:
        _check_alpha(alpha)
        T = area_threshold(self.n, alpha)
        for length in range(self.sink_G.size - 1, -1, -1):
            if self.sink_G[length] >= T:
                path = self.path_with(length)
                area = trapped_area(path)
                if area >= T:
                    return ConstrainedSolution(
                        alpha, T, length, path, area, float(length), 0, "exact",
                        dual_bound=float(length), area_profile=self.sink_G,
                    )
        raise Infeasible(T, self.max_area)


def exact_length_area_dp(cloud, n, alpha, cap: int = 4000) -> ConstrainedSolution:
    _check_alpha(alpha)
    return ExactProfile(cloud, n, cap).solve(alpha)


# --- Lagrangian mode -------------------------------------------------------

def _segment(ax, ay, bx, by):
    return 0.5 * ((bx - ax) * (ay + by))


def repair_by_removal(path: IncreasingPath, threshold: float) -> IncreasingPath | None:
    """Drop vertices lying below their neighbours' chord until the area suffices.

    Each removal gains the area of the triangle it cuts off; the vertex with
    the largest gain goes first. Returns None if the area cannot be reached.
    """
    xs, ys = path.xs.tolist(), path.ys.tolist()
    area = polyline_area(xs, ys)
    while area < threshold and len(xs) > 2:
        best_gain, best_i = 0.0, -1
        for i in range(1, len(xs) - 1):
            gain = (_segment(xs[i - 1], ys[i - 1], xs[i + 1], ys[i + 1])
                    - _segment(xs[i - 1], ys[i - 1], xs[i], ys[i])
                    - _segment(xs[i], ys[i], xs[i + 1], ys[i + 1]))
            if gain > best_gain:
                best_gain, best_i = gain, i
        if best_i < 0:
            return None
        del xs[best_i], ys[best_i]
        area = polyline_area(xs, ys)
    if area < threshold:
        return None
    return IncreasingPath(path.n, xs, ys)


def augment_by_insertion(cloud, path: IncreasingPath, threshold: float) -> IncreasingPath:
    """Greedily insert cloud points while the area stays above the threshold.

    Each step inserts the point (between consecutive vertices it fits
    between) that costs the least area.
    """
    xs, ys = path.xs.tolist(), path.ys.tolist()
    cx, cy = cloud.xs, cloud.ys
    area = polyline_area(xs, ys)
    while True:
        slack = area - threshold
        best = None
        for i in range(len(xs) - 1):
            ax, ay, bx, by = xs[i], ys[i], xs[i + 1], ys[i + 1]
            lo = np.searchsorted(cx, ax, side="left")
            hi = np.searchsorted(cx, bx, side="right")
            if hi <= lo:
                continue
            px, py = cx[lo:hi], cy[lo:hi]
            ok = (py >= ay) & (py <= by)
            # exclude the vertices themselves
            ok &= ~(((px == ax) & (py == ay)) | ((px == bx) & (py == by)))
            if not ok.any():
                continue
            px, py = px[ok], py[ok]
            loss = _segment(ax, ay, bx, by) - _segment(ax, ay, px, py) - _segment(px, py, bx, by)
            j = int(np.argmin(loss))
            if loss[j] <= slack and (best is None or loss[j] < best[0]):
                best = (float(loss[j]), i, float(px[j]), float(py[j]))
        if best is None:
            break
        _, i, px, py = best
        xs.insert(i + 1, px)
        ys.insert(i + 1, py)
        new_area = polyline_area(xs, ys)
        if new_area < threshold:  # rounding; undo and stop
            del xs[i + 1], ys[i + 1]
            break
        area = new_area
    return IncreasingPath(path.n, xs, ys)


def ranked_paths(cloud, n, lam: float, k: int):
    """The ``k`` best paths by |path| + lam * area, best first.

    DAG k-best DP: the r-th best path into p extends one of the k best paths
    into some predecessor, so keeping k entries per point is exact.
    Returns a list of (score, IncreasingPath).
    """
    xs, ys = cloud.xs, cloud.ys
    N = xs.size
    n = float(n)
    sc = np.full((N, k), -np.inf)
    pq = np.full((N, k), -2, dtype=np.int64)
    pr = np.zeros((N, k), dtype=np.int64)
    sink = None
    for p in range(N + 1):
        if p < N:
            xp, yp = xs[p], ys[p]
            idx = np.flatnonzero(ys[:p] <= yp)
            gain = 1.0
        else:
            xp = yp = n
            idx = np.arange(N)
            gain = 0.0
        t = 0.5 * ((xp - xs[idx]) * (ys[idx] + yp))
        cand = (sc[idx] + lam * t[:, None]).ravel()
        cq = np.repeat(idx, k)
        cr = np.tile(np.arange(k), idx.size)
        cand = np.concatenate(([0.0 + lam * (0.5 * (xp * yp))], cand))
        cq = np.concatenate(([-1], cq))
        cr = np.concatenate(([0], cr))
        top = np.argsort(-cand, kind="stable")[:k]
        top = top[cand[top] > -np.inf]
        if p < N:
            m = top.size
            sc[p, :m] = cand[top] + gain
            pq[p, :m] = cq[top]
            pr[p, :m] = cr[top]
        else:
            sink = (cand[top], cq[top], cr[top])
    out = []
    for score, q, r in zip(*sink):
        idx = []
        q, r = int(q), int(r)
        while q >= 0:
            idx.append(q)
            q, r = int(pq[q, r]), int(pr[q, r])
        idx.reverse()
        out.append((float(score), _path(cloud, n, idx)))
    return out


def _close_gap(cloud, n, lam, T, best_len, k):
    """Upper bound on the constrained optimum from ranked paths at ``lam``.

    A feasible path has |path| <= |path| + lam * (area - T). Listing paths in
    decreasing score until that quantity drops below best_len + 1 shows no
    unlisted feasible path is longer than best_len. Returns the bound and
    any feasible paths met on the way.
    """
    ranked = ranked_paths(cloud, n, lam, k + 1)
    found = []
    bound = -math.inf
    for i, (score, path) in enumerate(ranked):
        d = score - lam * T
        if i == k:
            # listing budget spent: unlisted paths score at most d
            bound = max(best_len, d)
            break
        if trapped_area(path) >= T:
            found.append(path)
            best_len = max(best_len, path.length)
        if d < best_len + 1 - 1e-9 * (1.0 + abs(d)):
            bound = max(bound, best_len)
            break
    else:
        # every path listed
        bound = max(bound, best_len)
    return float(bound), found


class LagrangianCache:
    """Memo of Lagrangian evaluations on one cloud, shared across alphas."""

    def __init__(self, cloud, n):
        self.cloud = cloud
        self.n = float(n)
        self.outcomes: dict[float, LagrangianOutcome] = {}
        self._max_area = None

    def at(self, lam: float) -> LagrangianOutcome:
        lam = float(lam)
        out = self.outcomes.get(lam)
        if out is None:
            out = self.outcomes[lam] = lagrangian_best(self.cloud, self.n, lam)
        return out

    def max_area(self) -> tuple[float, IncreasingPath]:
        if self._max_area is None:
            self._max_area = _max_area_path(self.cloud, self.n)
        return self._max_area


def _floor_bound(ub: float) -> int:
    return math.floor(ub + 1e-9 * (1.0 + abs(ub)))


def solve_lagrangian(cloud, n, alpha, opts: SolverOptions | None = None,
                     cache: LagrangianCache | None = None) -> ConstrainedSolution:
    """Dual search on lambda plus candidate repair.

    The bracket [lo, hi] holds an infeasible and a feasible optimizer. The
    next lambda is where their score lines |path| + lambda * (area - T) cross
    (falling back to the midpoint). If the optimizer there scores no more
    than both lines, that lambda minimizes the dual and the search stops.
    """
    _check_alpha(alpha)
    opts = opts or SolverOptions()
    n = float(n)
    cache = cache or LagrangianCache(cloud, n)
    T = area_threshold(n, alpha)
    lam_max = opts.lambda_max if opts.lambda_max is not None else 4.0 / n
    tol = opts.lambda_tol if opts.lambda_tol is not None else 1e-6 / n

    max_area, max_path = cache.max_area()
    if max_area < T:
        raise Infeasible(T, max_area)

    samples: list[tuple[float, float]] = []
    feasible: list[IncreasingPath] = []
    infeasible: list[IncreasingPath] = []
    ub = math.inf

    def evaluate(lam):
        nonlocal ub
        o = cache.at(lam)
        samples.append((o.lam, o.score))
        ub = min(ub, o.score - o.lam * T)
        (feasible if o.area >= T else infeasible).append(o.path)
        return o

    def best_len():
        return max((p.length for p in feasible), default=-1)

    lo = evaluate(0.0)
    if lo.area >= T:
        return _finish(cloud, alpha, T, feasible, ub, samples, augment=False)

    # the cache is a pure memo: the search below visits the same lambdas
    # whether or not other alphas were solved first, so results do not
    # depend on solve order
    hi = None
    lam = lam_max
    for _ in range(64):
        o = evaluate(lam)
        if o.area >= T:
            hi = o
            break
        lo = o
        lam *= 2.0
    if hi is None:
        feasible.append(max_path)
    else:
        for _ in range(opts.max_bisect):
            if hi.lam - lo.lam < tol or _floor_bound(ub) <= best_len():
                break
            lam = (lo.length - hi.length) / (hi.area - lo.area)
            if not (lo.lam < lam < hi.lam):
                lam = 0.5 * (lo.lam + hi.lam)
            o = evaluate(lam)
            line = max(lo.length + lam * lo.area, hi.length + lam * hi.area)
            if o.score <= line + 1e-9 * (1.0 + abs(line)):
                break  # dual minimum reached
            if o.area >= T:
                hi = o
            else:
                lo = o

    for p in infeasible:
        r = repair_by_removal(p, T)
        if r is not None:
            feasible.append(r)
    return _finish(cloud, alpha, T, feasible, ub, samples, augment=True, opts=opts)


def _finish(cloud, alpha, T, feasible, ub, samples, augment, opts=None):
    def rank(paths):
        # longest first; among equals the least area
        uniq = {(p.xs.tobytes(), p.ys.tobytes()): p for p in paths}
        return sorted(uniq.values(), key=lambda p: (-p.length, trapped_area(p)))

    pool = rank(feasible)
    dual = float(ub)
    bound = dual
    if augment:
        improved = []
        for p in pool[:4]:
            if p.length >= _floor_bound(bound):
                break
            improved.append(augment_by_insertion(cloud, p, T))
        pool = rank(pool + improved)
        if (opts is not None and opts.kbest > 0 and cloud.count <= opts.kbest_cap
                and pool[0].length < _floor_bound(bound)):
            lam = min(samples, key=lambda s: s[1] - s[0] * T)[0]
            enum_bound, found = _close_gap(cloud, pool[0].n, lam, T, pool[0].length, opts.kbest)
            pool = rank(pool + found)
            bound = min(bound, enum_bound)
    best = pool[0]
    area = trapped_area(best)
    if not area >= T:
        raise AssertionError("selected candidate violates the area constraint")
    gap = max(0, _floor_bound(bound) - best.length)
    return ConstrainedSolution(
        alpha, T, best.length, best, area, float(bound), gap, "lagrangian",
        dual_samples=tuple(samples), dual_bound=dual,
    )


def solve_constrained(cloud, n, alpha, opts: SolverOptions | None = None, *,
                      cache=None, profile: ExactProfile | None = None) -> ConstrainedSolution:
    """Longest path trapping at least (1/2 + alpha) n^2; raises Infeasible."""
    _check_alpha(alpha)
    opts = opts or SolverOptions()
    mode = opts.mode
    if mode == "auto":
        mode = "exact" if cloud.count <= opts.exact_cap else "lagrangian"
    if mode == "exact":
        if profile is None:
            profile = ExactProfile(cloud, n, opts.exact_cap)
        return profile.solve(alpha)
    return solve_lagrangian(cloud, n, alpha, opts, cache)
