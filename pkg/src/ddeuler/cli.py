"""Command line interface.

Subcommands:

* ``convergence`` -- Monte Carlo error sweep over a list of mesh sizes,
  slope fits, CSV/SVG output.
* ``compare``     -- the same sweep once per scheme (randomized and
  classical) against identical references.
* ``certify``     -- a-priori bound certificate for a preset plus bound and
  Hoelder checks on a reference run.
* ``solve``       -- a single trajectory, dumped as CSV.

Exit codes: 0 success, 1 configuration error, 2 solver divergence (partial
results are still written).
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .analysis import ReferenceSpec
from .bounds import bound_certificate, check_bounds, check_holder
from .core import ConfigError, ValidationError, write_trajectory_csv
from .experiment import (
    ExperimentConfig,
    compare_schemes,
    run_experiment,
    solve_trajectory,
)
from .problems import PRESET_NAMES, make_preset
from .solvers import DivergenceError

__all__ = ["main"]


def _parse_p(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _parse_n_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad N list {text!r}: {exc}")


def _add_problem_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("problem")
    group.add_argument("--problem", choices=PRESET_NAMES, required=True)
    group.add_argument("--alpha", type=float, default=None)
    group.add_argument("--gamma", type=float, default=None)
    group.add_argument("--M", type=float, default=None)
    group.add_argument("--P", type=float, default=None)
    group.add_argument("--lambda", dest="lam", type=float, default=None)
    group.add_argument("--lambda1", type=float, default=None)
    group.add_argument("--tau", type=float, default=None)
    group.add_argument("--n", type=int, default=None)
    group.add_argument("--x0", type=float, default=None)
    group.add_argument("--h-ref", dest="h_ref", type=float, default=None,
                       help="path step for the wiener preset")


def _build_preset(args):
    overrides = {
        name: getattr(args, name)
        for name in ("alpha", "gamma", "M", "P", "lam", "lambda1", "tau", "n", "x0", "h_ref")
        if getattr(args, name, None) is not None
    }
    if args.problem == "wiener":
        # the frozen path realization is derived from the master seed
        overrides.setdefault("seed", args.seed)
    return make_preset(args.problem, **overrides)


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--N-list", dest="n_list", type=_parse_n_list, required=True,
                        help="comma-separated steps-per-interval values")
    parser.add_argument("--K", type=int, default=200, help="Monte Carlo samples")
    ref = parser.add_mutually_exclusive_group()
    ref.add_argument("--ref-m", type=int, default=None, help="reference refinement factor")
    ref.add_argument("--ref-step", type=float, default=None, help="absolute reference step")
    parser.add_argument("--oracle", action="store_true",
                        help="measure against the preset's closed form instead of a reference run")
    parser.add_argument("--p", type=_parse_p, default=2.0, help="error norm order")
    parser.add_argument("--scheme", choices=("randomized", "classical"), default="randomized")
    parser.add_argument("--csv", default=None, help="errors CSV path (slopes go to <stem>_slopes.csv)")
    parser.add_argument("--svg", default=None, help="log-log plot path")


def _experiment_config(args) -> ExperimentConfig:
    ref = None
    if args.ref_m is not None:
        ref = ReferenceSpec.by_factor(args.ref_m)
    elif args.ref_step is not None:
        ref = ReferenceSpec.by_step(args.ref_step)
    return ExperimentConfig(
        preset=_build_preset(args),
        N_list=args.n_list,
        K=args.K,
        ref=ref,
        seed=args.seed,
        p=args.p,
        scheme=args.scheme,
        oracle=args.oracle,
        csv_path=args.csv,
        svg_path=args.svg,
    )


def _print_result(result, scheme: str) -> None:
    print(f"[{scheme}]")
    for N, h, err in result.table.max_over_intervals():
        print(f"  N={N:<8d} h={h:<12.6g} max-over-j err={err:.6g}")
    if result.degenerate:
        print(f"  slope fit: {result.degenerate}")
    else:
        s = result.slopes
        pairs = ", ".join(f"{a}->{b}: {v:.3f}" for a, b, v in s.pairwise)
        print(f"  pairwise slopes: {pairs}")
        print(f"  ols slope {s.ols_slope:.4f} (intercept {s.ols_intercept:.3f}, r2 {s.r_squared:.4f})")
    for j, rep in sorted(result.per_interval.items()):
        print(f"  interval j={j}: ols slope {rep.ols_slope:.4f}, pairwise mean {rep.mean_pairwise:.4f}")
    for failure in result.table.failures:
        print(f"  WARNING sample {failure.sample} at N={failure.N} diverged: {failure.detail}",
              file=sys.stderr)
    if result.csv_path:
        print(f"  errors csv: {result.csv_path}")
        print(f"  slopes csv: {result.slopes_csv_path}")
    if result.svg_path:
        print(f"  svg: {result.svg_path}")


def _cmd_convergence(args) -> int:
    result = run_experiment(_experiment_config(args))
    _print_result(result, args.scheme)
    return result.exit_code


def _cmd_compare(args) -> int:
    comparison = compare_schemes(_experiment_config(args))
    _print_result(comparison.randomized, "randomized")
    _print_result(comparison.classical, "classical")
    return comparison.exit_code


def _cmd_certify(args) -> int:
    preset = _build_preset(args)
    problem = preset.problem
    if preset.envelope is None:
        raise ConfigError(f"preset {preset.name!r} has no growth envelope")
    cert = bound_certificate(
        preset.envelope.l1_norms(problem.n),
        preset.envelope.lp_norms(problem.n, args.p),
        float(np.linalg.norm(problem.x0)),
        args.p,
    )
    traj = solve_trajectory(preset, args.N, "randomized", args.seed)
    ks = "  ".join(f"K_{j - 1}={v:.6g}" for j, v in enumerate(cert.K))
    print(f"certificate ({preset.name}, p={args.p:g}): {ks}")
    bound_report = check_bounds(traj, cert)
    for e in bound_report.entries:
        verdict = "PASS" if e.ok else "FAIL"
        print(f"bounds  j={e.j}: max|y| {e.observed:.6g} <= K_j {e.limit:.6g}  {verdict}")
    holder_report = check_holder(traj, cert)
    for e in holder_report.entries:
        verdict = "PASS" if e.ok else "FAIL"
        print(
            f"holder  j={e.j}: worst |dy|/|dt|^{holder_report.exponent:g} "
            f"{e.worst_ratio:.6g} <= C_j {e.limit:.6g}  {verdict}"
        )
    return 0


def _cmd_solve(args) -> int:
    preset = _build_preset(args)
    traj = solve_trajectory(preset, args.N, args.scheme, args.seed)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            write_trajectory_csv(traj, fh)
        print(f"trajectory csv: {args.csv}")
    else:
        write_trajectory_csv(traj, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddeuler",
        description="Randomized Euler solver and convergence harness for constant-lag DDEs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence", help="Monte Carlo convergence sweep")
    _add_problem_flags(conv)
    _add_experiment_flags(conv)
    conv.add_argument("--seed", type=int, default=0)
    conv.set_defaults(func=_cmd_convergence)

    comp = sub.add_parser("compare", help="randomized vs classical sweep")
    _add_problem_flags(comp)
    _add_experiment_flags(comp)
    comp.add_argument("--seed", type=int, default=0)
    comp.set_defaults(func=_cmd_compare)

    cert = sub.add_parser("certify", help="bound certificate checks on a reference run")
    _add_problem_flags(cert)
    cert.add_argument("--N", type=int, default=4096, help="reference mesh steps per interval")
    cert.add_argument("--p", type=_parse_p, default=math.inf)
    cert.add_argument("--seed", type=int, default=0)
    cert.set_defaults(func=_cmd_certify)

    solve = sub.add_parser("solve", help="single trajectory dump")
    _add_problem_flags(solve)
    solve.add_argument("--N", type=int, required=True)
    solve.add_argument("--scheme", choices=("randomized", "classical"), default="randomized")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--csv", default=None)
    solve.set_defaults(func=_cmd_solve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"solver divergence: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
