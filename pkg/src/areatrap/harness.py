"""Seeded experiments: configs, single trials and parallel sweeps.

Trial indexing
--------------
Trials are numbered n-major, then alpha, then replicate, following the
order of ``n_values`` and ``alpha_values`` in the config. The cloud of a
trial depends only on (master_seed, n, replicate): all alphas at the same
(n, replicate) see the same cloud, so a sweep solves them from one shared
DP table, and adding n or alpha values never changes existing clouds.
"""

from __future__ import annotations

import json
import math
import os
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .constrained import ConstrainedSolution, ExactProfile, LagrangianCache, SolverOptions, solve_constrained
from .errors import Infeasible, InvalidInput, InvalidParameter
from .lpp import topmost_geodesic, transversal_fluctuation
from .limitshape import LimitShape, deviation_from_limit
from .roughness import RoughnessReport, analyze
from .sampler import MASK64, PointCloud, derive_seed, sample_poisson_square

THREADS_ENV = "AREATRAP_THREADS"

CSV_HEADER = (
    "master_seed,trial_index,n,alpha,point_count,status,L_unconstrained,L_alpha,"
    "achieved_area_ratio,gap,mfl_all,mfl_interior,mlr_all,mlr_interior,"
    "hausdorff_over_n,tf_unconstrained,wall_ms"
)
COLUMNS = tuple(CSV_HEADER.split(","))


# --- config ----------------------------------------------------------------

_SOLVER_KEYS = {"mode", "lambda_tol", "max_bisect", "exact_cap"}
_OUTPUT_KEYS = {"results", "plots"}


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    n_values: tuple[float, ...]
    alpha_values: tuple[float, ...]
    replicates: tuple[int, ...]  # one count per n value
    delta: float = math.pi / 10
    epsilon: float = 0.1
    solver: SolverOptions = field(default_factory=SolverOptions)
    hausdorff_ds: float = 1e-3  # sampling step as a fraction of n
    outputs: dict = field(default_factory=dict)
    threads: int | str = "auto"
    record_timing: bool = False  # wall_ms is left blank unless set

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise InvalidInput("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise InvalidInput(f"unknown config keys: {', '.join(unknown)}")
        for key in ("master_seed", "n_values", "alpha_values", "replicates"):
            if key not in d:
                raise InvalidInput(f"missing config key: {key}")

        seed = d["master_seed"]
        if not (isinstance(seed, int) and not isinstance(seed, bool) and 0 <= seed <= MASK64):
            raise InvalidParameter("master_seed must be an integer in [0, 2^64)")
        ns = _real_list(d["n_values"], "n_values")
        if not ns or any(not (x > 0) for x in ns):
            raise InvalidParameter("n_values must be a nonempty list of positive reals")
        if list(ns) != sorted(set(ns)):
            raise InvalidParameter("n_values must be strictly increasing")
        alphas = _real_list(d["alpha_values"], "alpha_values")
        if not alphas or any(not (0 < a < 0.5) for a in alphas) or len(set(alphas)) != len(alphas):
            raise InvalidParameter("alpha_values must be distinct reals in (0, 1/2)")

        reps = d["replicates"]
        if isinstance(reps, list):
            if len(reps) != len(ns):
                raise InvalidParameter("replicates list must have one entry per n value")
        else:
            reps = [reps] * len(ns)
        if any(not isinstance(r, int) or isinstance(r, bool) or r < 1 for r in reps):
            raise InvalidParameter("replicates must be integers >= 1")

        delta = _real(d.get("delta", math.pi / 10), "delta")
        if not (0 <= delta < math.pi / 4):
            raise InvalidParameter("delta must lie in [0, pi/4)")
        eps = _real(d.get("epsilon", 0.1), "epsilon")
        if not eps > 0:
            raise InvalidParameter("epsilon must be positive")

        solver = d.get("solver", {})
        if not isinstance(solver, dict):
            raise InvalidInput("solver must be an object")
        extra = sorted(set(solver) - _SOLVER_KEYS)
        if extra:
            raise InvalidInput(f"unknown solver keys: {', '.join(extra)}")
        try:
            opts = SolverOptions(**solver)
        except TypeError as exc:
            raise InvalidInput(f"bad solver options: {exc}") from None

        ds = _real(d.get("hausdorff_ds", 1e-3), "hausdorff_ds")
        if not ds > 0:
            raise InvalidParameter("hausdorff_ds must be positive")

        outputs = d.get("outputs", {})
        if not isinstance(outputs, dict) or any(not isinstance(v, str) for v in outputs.values()):
            raise InvalidInput("outputs must map names to path strings")
        extra = sorted(set(outputs) - _OUTPUT_KEYS)
        if extra:
            raise InvalidInput(f"unknown outputs keys: {', '.join(extra)}")

        threads = d.get("threads", "auto")
        if threads != "auto" and not (isinstance(threads, int) and not isinstance(threads, bool) and threads >= 1):
            raise InvalidParameter("threads must be a positive integer or 'auto'")
        timing = d.get("record_timing", False)
        if not isinstance(timing, bool):
            raise InvalidParameter("record_timing must be true or false")

        return cls(int(seed), tuple(ns), tuple(alphas), tuple(int(r) for r in reps),
                   delta, eps, opts, ds, dict(outputs), threads, timing)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text()
        try:
            data = json.loads(text, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"{path}: line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        s = self.solver
        return {
            "master_seed": self.master_seed,
            "n_values": list(self.n_values),
            "alpha_values": list(self.alpha_values),
            "replicates": list(self.replicates),
            "delta": self.delta,
            "epsilon": self.epsilon,
            "solver": {"mode": s.mode, "lambda_tol": s.lambda_tol,
                       "max_bisect": s.max_bisect, "exact_cap": s.exact_cap},
            "hausdorff_ds": self.hausdorff_ds,
            "outputs": dict(self.outputs),
            "threads": self.threads,
            "record_timing": self.record_timing,
        }

    @property
    def trial_count(self) -> int:
        return len(self.alpha_values) * sum(self.replicates)

    def locate(self, trial_index: int) -> tuple[float, float, int]:
        """(n, alpha, replicate) of a trial index."""
        if not (isinstance(trial_index, int) and 0 <= trial_index < self.trial_count):
            raise InvalidParameter(f"trial index must lie in [0, {self.trial_count}), got {trial_index!r}")
        k = trial_index
        A = len(self.alpha_values)
        for n, reps in zip(self.n_values, self.replicates):
            if k < A * reps:
                return n, self.alpha_values[k // reps], k % reps
            k -= A * reps
        raise AssertionError("unreachable")

    def index_of(self, n_pos: int, alpha_pos: int, rep: int) -> int:
        A = len(self.alpha_values)
        return A * sum(self.replicates[:n_pos]) + alpha_pos * self.replicates[n_pos] + rep

    def resolve_threads(self, override: int | None = None) -> int:
        if override is not None:
            t = override
        elif os.environ.get(THREADS_ENV):
            raw = os.environ[THREADS_ENV]
            try:
                t = int(raw)
            except ValueError:
                raise InvalidParameter(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        elif self.threads == "auto":
            t = os.cpu_count() or 1
        else:
            t = self.threads
        if t < 1:
            raise InvalidParameter("thread count must be >= 1")
        return t


def _reject_constant(name):
    raise InvalidInput(f"non-finite number {name} in config")


def _real(v, name) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidParameter(f"{name} must be a finite real, got {v!r}")
    return float(v)


def _real_list(v, name) -> list[float]:
    if not isinstance(v, list):
        raise InvalidInput(f"{name} must be a list")
    return [_real(x, name) for x in v]


# --- trials ----------------------------------------------------------------

def cloud_seed(master_seed: int, n: float, replicate: int) -> int:
    """Seed of the cloud for (n, replicate); n enters through its float64 bits."""
    n_bits = struct.unpack("<Q", struct.pack("<d", float(n)))[0]
    return derive_seed(derive_seed(master_seed, n_bits), replicate)


@dataclass(frozen=True)
class TrialRecord:
    master_seed: int
    trial_index: int
    n: float
    alpha: float
    point_count: int
    status: str  # "solved" or "infeasible"
    L_unconstrained: int
    L_alpha: int | None
    achieved_area_ratio: float | None
    gap: int | None
    mfl_all: float | None
    mfl_interior: float | None
    mlr_all: float | None
    mlr_interior: float | None
    hausdorff_over_n: float | None
    tf_unconstrained: float
    wall_ms: float | None

    def csv_row(self) -> str:
        return ",".join(_fmt(v) for v in asdict(self).values())

    def without_timing(self) -> "TrialRecord":
        d = asdict(self)
        d["wall_ms"] = None
        return TrialRecord(**d)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)  # shortest round-trip decimal
    return str(v)


class _CloudWork:
    """Everything shared by the trials on one cloud."""

    def __init__(self, cfg: ExperimentConfig, n: float, rep: int):
        self.cfg = cfg
        self.n = n
        self.cloud = sample_poisson_square(n, cloud_seed(cfg.master_seed, n, rep))
        origin, corner = (0.0, 0.0), (n, n)
        geo = topmost_geodesic(self.cloud, origin, corner)
        self.L = geo.length
        self.tf = transversal_fluctuation(geo.xs, geo.ys, origin, corner)
        opts = cfg.solver
        mode = opts.mode
        if mode == "auto":
            mode = "exact" if self.cloud.count <= opts.exact_cap else "lagrangian"
        self.opts = SolverOptions(mode, opts.lambda_max, opts.lambda_tol, opts.max_bisect,
                                  opts.exact_cap, opts.kbest, opts.kbest_cap)
        self.profile = ExactProfile(self.cloud, n, opts.exact_cap) if mode == "exact" else None
        self.cache = LagrangianCache(self.cloud, n) if mode == "lagrangian" else None

    def record(self, trial_index: int, alpha: float, started: float) -> TrialRecord:
        return self.outcome(trial_index, alpha, started).record

    def outcome(self, trial_index: int, alpha: float, started: float) -> "TrialOutcome":
        cfg, n = self.cfg, self.n
        sol = rep = None
        base = dict(master_seed=cfg.master_seed, trial_index=trial_index, n=n, alpha=alpha,
                    point_count=self.cloud.count, L_unconstrained=self.L, tf_unconstrained=self.tf)
        try:
            sol = solve_constrained(self.cloud, n, alpha, self.opts, cache=self.cache, profile=self.profile)
        except Infeasible:
            rec = TrialRecord(status="infeasible", L_alpha=None, achieved_area_ratio=None, gap=None,
                              mfl_all=None, mfl_interior=None, mlr_all=None, mlr_interior=None,
                              hausdorff_over_n=None, wall_ms=None, **base)
        else:
            if not sol.achieved_area >= sol.threshold:
                raise AssertionError(f"trial {trial_index}: area below threshold")
            if sol.length > self.L:
                raise AssertionError(f"trial {trial_index}: constrained length exceeds unconstrained")
            rep = analyze(sol.path, n, cfg.delta)
            shape = LimitShape.for_alpha(alpha)
            dev = deviation_from_limit(sol.path, shape, n, cfg.hausdorff_ds * n)
            rec = TrialRecord(
                status="solved", L_alpha=sol.length, achieved_area_ratio=sol.achieved_area / (n * n),
                gap=sol.gap, mfl_all=rep.mfl_all, mfl_interior=rep.mfl_interior, mlr_all=rep.mlr_all,
                mlr_interior=rep.mlr_interior, hausdorff_over_n=dev / n, wall_ms=None, **base,
            )
        if cfg.record_timing:
            d = asdict(rec)
            d["wall_ms"] = round((time.perf_counter() - started) * 1e3, 3)
            rec = TrialRecord(**d)
        return TrialOutcome(rec, sol, rep)


@dataclass(frozen=True)
class TrialOutcome:
    """A record together with the objects it was computed from."""

    record: TrialRecord
    solution: ConstrainedSolution | None
    report: RoughnessReport | None


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialRecord:
    """One trial; a deterministic function of (config, trial_index) apart from wall_ms."""
    started = time.perf_counter()
    n, alpha, rep = config.locate(trial_index)
    return _CloudWork(config, n, rep).record(trial_index, alpha, started)


def run_group(config: ExperimentConfig, n_pos: int, rep: int) -> list[TrialOutcome]:
    """All alphas of one (n, replicate) cloud, solved from a shared DP table."""
    started = time.perf_counter()
    n = config.n_values[n_pos]
    work = _CloudWork(config, n, rep)
    out = []
    for a_pos, alpha in enumerate(config.alpha_values):
        out.append(work.outcome(config.index_of(n_pos, a_pos, rep), alpha, started))
        started = time.perf_counter()
    return out


def _run_group(config, n_pos, rep) -> list[TrialRecord]:
    return [o.record for o in run_group(config, n_pos, rep)]


# --- sweeps ----------------------------------------------------------------

def sweep(config: ExperimentConfig, out, threads: int | None = None, progress=None) -> Path:
    """Run every trial and write the results CSV.

    Trials sharing a cloud run together as one task. Finished rows are
    appended as soon as every row sorting before them is done, so an
    interrupted sweep leaves a valid prefix, flagged by ``<out>.incomplete``.
    """
    out = Path(out)
    marker = out.with_name(out.name + ".incomplete")
    nthreads = config.resolve_threads(threads)
    # fail on an unwritable destination before any compute
    fh = open(out, "w", newline="")
    try:
        marker.write_text("sweep in progress\n")
        fh.write(CSV_HEADER + "\n")
        fh.flush()
        groups = [(i, r) for i in range(len(config.n_values)) for r in range(config.replicates[i])]
        # global row order is (n, alpha, index); a group fills one replicate
        # slot of every alpha row block of its n
        order = sorted(
            ((config.n_values[i], a, config.index_of(i, j, r)), (i, r))
            for i, r in groups
            for j, a in enumerate(config.alpha_values)
        )
        done: dict[int, TrialRecord] = {}
        next_row = 0

        def flush():
            nonlocal next_row
            while next_row < len(order) and order[next_row][0][2] in done:
                fh.write(done.pop(order[next_row][0][2]).csv_row() + "\n")
                next_row += 1
            fh.flush()

        if nthreads == 1:
            for i, r in groups:
                for rec in _run_group(config, i, r):
                    done[rec.trial_index] = rec
                flush()
                if progress:
                    progress(next_row, len(order))
        else:
            pool = ThreadPoolExecutor(max_workers=nthreads)
            try:
                futures = [pool.submit(_run_group, config, i, r) for i, r in groups]
                for fut in futures:
                    for rec in fut.result():
                        done[rec.trial_index] = rec
                    flush()
                    if progress:
                        progress(next_row, len(order))
            finally:
                pool.shutdown(wait=True, cancel_futures=True)
        if next_row != len(order):
            raise AssertionError("sweep finished with unwritten rows")
    finally:
        fh.close()
    marker.unlink()
    return out


def read_results(path) -> list[dict]:
    """Parse a results CSV into dicts with typed values (None for blanks)."""
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise InvalidInput(f"{path}: not a results file (header mismatch)")
    ints = {"master_seed", "trial_index", "point_count", "L_unconstrained", "L_alpha", "gap"}
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(COLUMNS):
            raise InvalidInput(f"{path}: line {lineno}: expected {len(COLUMNS)} fields")
        row = {}
        for k, v in zip(COLUMNS, parts):
            if k == "status":
                row[k] = v
            elif v == "":
                row[k] = None
            else:
                try:
                    row[k] = int(v) if k in ints else float(v)
                except ValueError:
                    raise InvalidInput(f"{path}: line {lineno}: bad value {v!r} for {k}") from None
        rows.append(row)
    return rows


def cloud_for(config: ExperimentConfig, trial_index: int) -> PointCloud:
    n, _, rep = config.locate(trial_index)
    return sample_poisson_square(n, cloud_seed(config.master_seed, n, rep))
