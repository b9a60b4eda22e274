"""Command-line interface.

Subcommands: simulate, check-schedule, solve, verify-gradient, plot.
Exit codes: 0 success, 1 runtime or assertion failure, 2 usage/config
error.  The MONOTONE_NASH_THREADS environment variable caps the
simulation worker pool.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiment
from .experiment import load_config, parse_number
from .games import registry, registry_names
from .schedules import validate_exponents
from .smoothing import (
    SmoothedQuery,
    agree_within,
    analytic_smoothed_gradient,
    finite_difference_gradient,
    mixed_mapping,
    score_gradient,
)
from .solvers import (
    ConvergenceError,
    SolverSettings,
    fixed_point_residual,
    path_max_norm,
    solve_tikhonov,
    solve_vi,
    tikhonov_path,
)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2

_PATH_EPSILONS = (1.0, 0.1, 0.01, 0.001)


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the base seed")
    common.add_argument("--out", default=None, help="output directory or file")
    common.add_argument("--quiet", action="store_true", help="suppress informational output")

    parser = argparse.ArgumentParser(
        prog="monotone-nash",
        description="Payoff-based Nash equilibrium learning in monotone games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[common], help="run learner replications")
    sim.add_argument("config", nargs="?", default=None, help="key = value config file")
    sim.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="override a config key (repeatable)")
    sim.add_argument("--baseline", action="store_true",
                     help="drop the regularization term (regularized = false)")
    sim.add_argument("--allow-invalid-schedule", action="store_true",
                     help="downgrade schedule validation failures to warnings")
    sim.add_argument("--replications", type=int, default=None)
    sim.add_argument("--max-iters", type=int, default=None)

    check = sub.add_parser("check-schedule", parents=[common],
                           help="validate schedule exponents (a b c)")
    check.add_argument("a", type=parse_number)
    check.add_argument("b", type=parse_number)
    check.add_argument("c", type=parse_number)

    solve = sub.add_parser("solve", parents=[common], help="run a reference solver")
    solve.add_argument("game", choices=registry_names())
    solve.add_argument("mode", choices=["vi", "tikhonov", "path"])
    solve.add_argument("--epsilon", type=float, default=1.0,
                       help="regularization weight for tikhonov mode")
    solve.add_argument("--tol", type=float, default=1e-9)
    solve.add_argument("--max-iters", type=int, default=200_000)

    verify = sub.add_parser("verify-gradient", parents=[common],
                            help="three-way smoothed-gradient comparison")
    verify.add_argument("game", choices=registry_names())
    verify.add_argument("--sigma", type=float, default=0.2)
    verify.add_argument("--samples", type=int, default=100_000)

    plot = sub.add_parser("plot", parents=[common], help="render a runs CSV to SVG")
    plot.add_argument("input", help="trajectory CSV produced by simulate")

    return parser


def _cmd_simulate(args) -> int:
    overrides: dict[str, str] = {}
    for item in args.overrides:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    config = load_config(args.config, overrides)
    if args.baseline:
        config.regularized = False
    if args.allow_invalid_schedule:
        config.allow_invalid_schedule = True
    if args.replications is not None:
        config = experiment.config_from_mapping({"replications": str(args.replications)}, config)
    if args.max_iters is not None:
        config = experiment.config_from_mapping({"max_iters": str(args.max_iters)}, config)
    if args.seed is not None:
        config.base_seed = args.seed
    if args.out is not None:
        config.out = args.out

    results = experiment.run_experiment(config)
    paths = experiment.write_artifacts(config, results)
    if not args.quiet:
        finals = [r.summary.final_dist for r in results if r.summary.final_dist is not None]
        hits = sum(1 for r in results if r.summary.first_hit_0p1 is not None)
        print(f"game={config.game} replications={config.replications} "
              f"iters={config.max_iters} regularized={config.regularized}")
        if finals:
            print(f"median final distance to reference: {np.median(finals):.6g}")
        print(f"replications reaching distance <= {experiment.HIT_THRESHOLD}: "
              f"{hits}/{config.replications}")
        print(f"wrote {paths['runs']} and {paths['summary']}")
    return EXIT_OK


def _cmd_check_schedule(args) -> int:
    report = validate_exponents((args.a, args.b, args.c))
    if not args.quiet or not report.ok:
        print(report)
    return EXIT_OK if report.ok else EXIT_RUNTIME


def _solve_payload(args) -> dict:
    game = registry(args.game)
    settings = SolverSettings(tol=args.tol, max_iters=args.max_iters)
    if args.mode == "vi":
        y = solve_vi(game, settings)
        return {
            "game": args.game,
            "mode": "vi",
            "y": y.tolist(),
            "residual": fixed_point_residual(game, y, step=1.0),
        }
    if args.mode == "tikhonov":
        point = solve_tikhonov(game, args.epsilon, settings)
        return {
            "game": args.game,
            "mode": "tikhonov",
            "epsilon": point.epsilon,
            "y": point.y.tolist(),
            "residual": point.residual,
            "iterations": point.iterations,
        }
    path = tikhonov_path(game, _PATH_EPSILONS, settings)
    return {
        "game": args.game,
        "mode": "path",
        "path": [
            {
                "epsilon": p.epsilon,
                "y": p.y.tolist(),
                "residual": p.residual,
                "iterations": p.iterations,
            }
            for p in path
        ],
        "max_norm": path_max_norm(path),
        "limit": path[-1].y.tolist(),
    }


def _cmd_solve(args) -> int:
    payload = _solve_payload(args)
    solution = payload.get("limit", payload.get("y"))
    if not args.quiet:
        print(f"{args.game} {args.mode}: {np.array2string(np.asarray(solution), precision=8)}")
    text = json.dumps(payload, indent=2)
    if args.out is not None:
        Path(args.out).write_text(text + "\n")
        if not args.quiet:
            print(f"wrote {args.out}")
    else:
        print(text)
    return EXIT_OK


def _cmd_verify_gradient(args) -> int:
    game = registry(args.game)
    seed = args.seed if args.seed is not None else 0
    rng = np.random.default_rng(seed)
    lower, upper = game.joint_bounds()
    mu = rng.uniform(np.where(np.isfinite(lower), lower, -1.0),
                     np.where(np.isfinite(upper), upper, 1.0))
    query = SmoothedQuery(game=game, mu=mu, sigma=args.sigma,
                          n_samples=args.samples, seed=seed)
    all_ok = True
    if not args.quiet:
        print(f"game={args.game} mu={np.array2string(mu, precision=4)} "
              f"sigma={args.sigma} samples={args.samples} seed={seed}")
    for i in range(game.n_players):
        score = score_gradient(query, i)
        others = [mixed_mapping(query, i), finite_difference_gradient(query, i)]
        if game.smoothed_gradient is not None:
            others.append(analytic_smoothed_gradient(query, i))
        for other in others:
            ok = bool(np.all(agree_within(score, other)))
            all_ok &= ok
            if not args.quiet:
                gap = np.abs(score.value - other.value)
                print(f"player {i}: score_mc vs {other.method}: "
                      f"|gap|={np.array2string(gap, precision=3)} "
                      f"{'ok' if ok else 'DISAGREES (beyond 3 SE)'}")
    if not args.quiet:
        print("all estimators agree within 3 SE" if all_ok else "gradient check FAILED")
    return EXIT_OK if all_ok else EXIT_RUNTIME


def _cmd_plot(args) -> int:
    from .plotting import plot_trajectories

    out = args.out
    if out is None:
        out = str(Path(args.input).with_suffix(".svg"))
    plot_trajectories(args.input, out)
    if not args.quiet:
        print(f"wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "check-schedule": _cmd_check_schedule,
        "solve": _cmd_solve,
        "verify-gradient": _cmd_verify_gradient,
        "plot": _cmd_plot,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, RuntimeError, AssertionError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
