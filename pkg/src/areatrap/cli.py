"""Command line entry point: ``areatrap <subcommand> ...``.

Exit codes: 0 success, 1 validation error, 2 internal error, 3 oracle mismatch.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .constrained import SolverOptions, solve_constrained
from .errors import AreatrapError, Infeasible, ParseError, ValidationError
from .geometry import IncreasingPath
from .sampler import SeedSpec, load_cloud, read_xy_rows, sample_poisson_square, save_cloud

EXIT_OK, EXIT_VALIDATION, EXIT_INTERNAL, EXIT_MISMATCH = 0, 1, 2, 3

PATH_MAGIC = "# areatrap-path v1"


def save_path(path: IncreasingPath, out, *, alpha, length, area, gap, method) -> None:
    lines = [
        PATH_MAGIC,
        f"# n={path.n!r} alpha={alpha!r} length={length} area={area!r} gap={gap} method={method}",
        "x,y",
    ]
    lines += [f"{x!r},{y!r}" for x, y in zip(path.xs.tolist(), path.ys.tolist())]
    Path(out).write_text("\n".join(lines) + "\n")


def load_path(src) -> IncreasingPath:
    lines = Path(src).read_text().splitlines()
    if not lines or lines[0].strip() != PATH_MAGIC:
        raise ParseError("missing path header", 1)
    if len(lines) < 3 or not lines[1].startswith("# "):
        raise ParseError("missing metadata line", 2)
    meta = dict(kv.split("=", 1) for kv in lines[1][2:].split() if "=" in kv)
    try:
        n = float(meta["n"])
    except (KeyError, ValueError):
        raise ParseError("metadata lacks a valid n", 2) from None
    if lines[2].strip() != "x,y":
        raise ParseError("expected column header 'x,y'", 3)
    xs, ys = read_xy_rows(lines[3:], 4)
    return IncreasingPath(n, xs, ys)


def _cmd_sample(a):
    cloud = sample_poisson_square(a.n, SeedSpec(a.seed, a.trial))
    save_cloud(cloud, a.out)
    print(f"wrote {cloud.count} points to {a.out}")


def _cmd_solve(a):
    if a.cloud:
        cloud = load_cloud(a.cloud)
        n = cloud.n
    else:
        if a.n is None:
            raise ValidationError("solve needs --cloud or --n")
        n = a.n
        cloud = sample_poisson_square(n, SeedSpec(a.seed, a.trial))
    opts = SolverOptions(mode=a.mode, exact_cap=a.exact_cap)
    try:
        sol = solve_constrained(cloud, n, a.alpha, opts)
    except Infeasible as exc:
        print(f"infeasible: threshold {exc.threshold!r} exceeds max trappable area {exc.max_trappable_area!r}")
        return EXIT_VALIDATION
    print(f"n={n!r} points={cloud.count} alpha={a.alpha!r} length={sol.length} "
          f"area={sol.achieved_area!r} threshold={sol.threshold!r} upper_bound={sol.upper_bound!r} "
          f"gap={sol.gap} method={sol.method}")
    if a.out:
        save_path(sol.path, a.out, alpha=a.alpha, length=sol.length, area=sol.achieved_area,
                  gap=sol.gap, method=sol.method)
    return EXIT_OK


def _cmd_limit_shape(a):
    from .limitshape import LimitShape, psi

    shape = LimitShape.for_alpha(a.alpha)
    print("alpha,c,w")
    print(f"{shape.alpha!r},{shape.c!r},{shape.w!r}")
    if a.curve_out:
        if a.samples < 2:
            raise ValidationError("--samples must be >= 2")
        lines = ["x,psi_x"]
        for i in range(a.samples):
            x = i / (a.samples - 1)
            lines.append(f"{x!r},{psi(shape, x)!r}")
        Path(a.curve_out).write_text("\n".join(lines) + "\n")


def _cmd_trial(a):
    from .harness import COLUMNS, ExperimentConfig, run_trial

    cfg = ExperimentConfig.load(a.config)
    rec = run_trial(cfg, a.index)
    print(",".join(COLUMNS))
    print(rec.csv_row())


def _cmd_sweep(a):
    from .harness import ExperimentConfig, sweep

    cfg = ExperimentConfig.load(a.config)
    out = a.out or cfg.outputs.get("results")
    if not out:
        raise ValidationError("no output path: pass --out or set outputs.results")

    def progress(done, total):
        if a.verbose:
            print(f"{done}/{total} rows", file=sys.stderr)

    sweep(cfg, out, threads=a.threads, progress=progress)
    print(f"wrote {cfg.trial_count} rows to {out}")
    plots = cfg.outputs.get("plots")
    if plots:
        from .harness import read_results
        from .plots import emit_plot

        rows = read_results(out)
        Path(plots).mkdir(parents=True, exist_ok=True)
        for kind in ("lln", "exponents"):
            try:
                emit_plot(rows, kind, Path(plots) / f"{kind}.svg")
            except ValidationError as exc:
                print(f"skipped {kind} plot: {exc}", file=sys.stderr)
        emit_plot(sorted(set(cfg.alpha_values)), "shape", Path(plots) / "shape.svg")


def _cmd_fit(a):
    from .analysis import fit_exponent
    from .harness import read_results

    fit = fit_exponent(read_results(a.input), a.field)
    print("field,slope,intercept,stderr_slope,r_squared,points")
    print(f"{fit.field},{fit.slope!r},{fit.intercept!r},{fit.stderr_slope!r},{fit.r_squared!r},{len(fit.points)}")


def _cmd_plot(a):
    from .plots import emit_plot

    if a.kind == "shape":
        alphas = a.alpha or [0.05, 0.2, 0.4]
        emit_plot(alphas, "shape", a.out)
    else:
        from .harness import read_results

        if not a.input:
            raise ValidationError(f"plot kind {a.kind} needs --in")
        emit_plot(read_results(a.input), a.kind, a.out)
    print(f"wrote {a.out}")


def _cmd_oracle_check(a):
    from .checks import check_constrained, check_lpp

    lpp_points = min(a.max_points, 10)
    lr = check_lpp(a.seed, a.trials, n=math.sqrt(0.9 * lpp_points), max_points=lpp_points)
    cr = check_constrained(a.seed, a.trials, n=4.0, max_points=a.max_points)
    print(f"lpp: {lr.instances} clouds, agreement {lr.agree}")
    print(f"constrained: {cr.clouds} clouds, {cr.feasible} feasible instances, exact agree {cr.exact_agree}, "
          f"lagrangian within gap {cr.lagrangian_within_gap}, gap zero {cr.lagrangian_gap_zero}")
    bad = lr.mismatches + cr.mismatches
    for m in bad:
        print(f"MISMATCH seed={a.seed} trial={m.seed_index} {m.what}: expected {m.expected}, got {m.got}")
    if cr.dual_violations or cr.area_violations:
        print(f"MISMATCH seed={a.seed}: {cr.dual_violations} dual violations, {cr.area_violations} area violations")
        return EXIT_MISMATCH
    return EXIT_MISMATCH if bad else EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage mistakes are validation errors (exit 1), not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="areatrap", description="Area-constrained last passage percolation toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("sample", help="sample a Poisson cloud on [0,n]^2")
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--trial", type=int, default=0, help="trial index mixed into the seed")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sample)

    s = sub.add_parser("solve", help="solve the area-constrained problem")
    s.add_argument("--cloud", help="cloud file written by 'sample'")
    s.add_argument("--n", type=float)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trial", type=int, default=0)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--mode", choices=["auto", "exact", "lagrangian"], default="auto")
    s.add_argument("--exact-cap", type=int, default=4000)
    s.add_argument("--out", help="write the path here")
    s.set_defaults(func=_cmd_solve)

    s = sub.add_parser("limit-shape", help="print c and w for alpha, optionally the curve")
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--curve-out")
    s.add_argument("--samples", type=int, default=101)
    s.set_defaults(func=_cmd_limit_shape)

    s = sub.add_parser("trial", help="run one trial of a config and print its row")
    s.add_argument("--config", required=True)
    s.add_argument("--index", type=int, required=True)
    s.set_defaults(func=_cmd_trial)

    s = sub.add_parser("sweep", help="run every trial of a config")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--threads", type=int)
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=_cmd_sweep)

    s = sub.add_parser("fit", help="fit a power law to a results column")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--field", required=True)
    s.set_defaults(func=_cmd_fit)

    s = sub.add_parser("plot", help="write an SVG figure")
    s.add_argument("--in", dest="input")
    s.add_argument("--kind", choices=["shape", "exponents", "lln"], required=True)
    s.add_argument("--alpha", type=float, action="append", help="curve for kind=shape (repeatable)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_plot)

    s = sub.add_parser("oracle-check", help="cross-check solvers against brute force")
    s.add_argument("--trials", type=int, default=100)
    s.add_argument("--max-points", type=int, default=12)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=_cmd_oracle_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except (AreatrapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - report, do not crash with a traceback
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
