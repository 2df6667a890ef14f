"""Command-line front end.

Commands:
    ml <alpha> <beta> <z>        print one Mittag-Leffler value
    simulate --config C --out P  solve; writes P.trajectory.txt, P.report.txt
    steer    --config C --out P  rho sweep; writes P.table.txt
    verify   --config C TRAJ     residual check of a trajectory file

Exit codes: 0 success, 2 usage or config error, 3 inadmissible coupling,
4 non-convergence, 5 unsupported regime, 6 verification failure.  All
output is deterministic; --seed is reserved and currently unused.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import RunConfig, build_forcing, build_grid, build_problem, load_config
from .control import reachability_experiment
from .errors import (
    AdmissibilityError,
    ConfigError,
    ConvergenceError,
    DomainError,
    UnsupportedRegimeError,
)
from .greens import solve_mild, verify_mild
from .serialize import (
    read_trajectory,
    render_verification,
    write_reachability_table,
    write_solve_report,
    write_trajectory,
)
from .specfun import mittag_leffler

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INADMISSIBLE = 3
EXIT_NO_CONVERGENCE = 4
EXIT_UNSUPPORTED = 5
EXIT_VERIFY_FAILED = 6


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracevol",
        description="fractional evolution equations with nonlocally pinned "
        "initial states: simulation, steering, verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ml = sub.add_parser("ml", help="evaluate the two-parameter Mittag-Leffler function")
    p_ml.add_argument("alpha", type=float)
    p_ml.add_argument("beta", type=float)
    p_ml.add_argument("z", type=float)

    for name, needs_out in (("simulate", True), ("steer", True), ("verify", False)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="run configuration file")
        if needs_out:
            p.add_argument("--out", required=True, help="output path prefix")
        else:
            p.add_argument("trajectory", help="trajectory file to check")
        p.add_argument(
            "--seed", type=int, default=None, help="reserved; runs are deterministic"
        )
    return parser


def _cmd_ml(args: argparse.Namespace) -> int:
    value = mittag_leffler(args.alpha, args.beta, args.z)
    print("%.13g" % value)
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig, out_prefix: str) -> int:
    problem = build_problem(cfg)
    grid = build_grid(cfg)
    traj, report = solve_mild(
        problem,
        grid,
        raw_forcing=build_forcing(cfg, grid),
        tol=cfg.tol,
        max_iter=cfg.max_iter,
    )
    write_trajectory(out_prefix + ".trajectory.txt", traj)
    write_solve_report(out_prefix + ".report.txt", report)
    print(
        "simulate: %d iterations, nonlocal residual %.3g"
        % (report.iterations, report.nonlocal_residual)
    )
    return EXIT_OK


def _cmd_steer(cfg: RunConfig, out_prefix: str) -> int:
    if cfg.forcing is not None:
        raise ConfigError("steer does not support a steady forcing term")
    problem = build_problem(cfg)
    grid = build_grid(cfg)
    if not np.any(problem.control_gains != 0.0):
        print(
            "warning: kappa = 0 leaves the control channel disconnected; "
            "steering cannot make progress",
            file=sys.stderr,
        )
    if not cfg.targets or not cfg.rhos:
        raise ConfigError("[experiment] targets and rho are required for steer")
    targets = [np.array(t, dtype=float) for t in cfg.targets]
    table = reachability_experiment(
        problem,
        grid,
        targets,
        list(cfg.rhos),
        tol=cfg.steer_tol,
        max_outer=cfg.max_outer,
    )
    write_reachability_table(out_prefix + ".table.txt", table)
    print("steer: %d sweep cells" % len(table.rows))
    return EXIT_OK


def _cmd_verify(cfg: RunConfig, trajectory_path: str) -> int:
    problem = build_problem(cfg)
    traj = read_trajectory(trajectory_path)
    if abs(traj.grid.horizon - cfg.horizon) > 1e-12 * max(1.0, cfg.horizon):
        raise ConfigError("trajectory horizon does not match the config")
    if traj.states.shape[1] != problem.n_modes:
        raise ConfigError("trajectory mode count does not match the config")
    report = verify_mild(problem, traj, raw_forcing=build_forcing(cfg, traj.grid))
    text, passed = render_verification(
        report, cfg.verify_equation_tol, cfg.verify_pinning_tol
    )
    print(text)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the usage message; keep its code for
        # --help (0) and force the documented code for bad usage
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "ml":
            return _cmd_ml(args)
        cfg = load_config(args.config)
        if args.command == "simulate":
            return _cmd_simulate(cfg, args.out)
        if args.command == "steer":
            return _cmd_steer(cfg, args.out)
        return _cmd_verify(cfg, args.trajectory)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AdmissibilityError as exc:
        print(f"inadmissible coupling: {exc}", file=sys.stderr)
        return EXIT_INADMISSIBLE
    except UnsupportedRegimeError as exc:
        print(f"unsupported regime: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConvergenceError as exc:
        print(f"no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
