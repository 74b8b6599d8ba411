"""Command-line front end: run experiment configs, print presets.

Exit codes: 0 on a passing run, 1 when the computation ran but a check
failed (or a numerical guard tripped), 2 for usage and configuration
errors. Set MNNS_THREADS to cap transform worker threads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Optional

from . import __version__, suites
from .config import ExperimentConfig, build_solver_config
from .errors import ConfigError, MnnsError
from .mild import save_trajectory
from .presets import preset_text
from .report import write_report


def _dispatch(cfg: ExperimentConfig) -> dict:
    p = cfg.params
    if cfg.command == "verify-young":
        return suites.young_suite(
            cfg.seed,
            cases_per_dim=p.get("cases_per_dim", 100),
            dims=tuple(p.get("dims", (1, 2, 3))),
            tolerance=p.get("tolerance", suites.YOUNG_TOLERANCE),
        )
    if cfg.command == "verify-decay":
        return suites.decay_suite(
            cfg.seed,
            pairs=p.get("pairs", 20),
            dims=tuple(p.get("dims", (2, 3))),
            tolerance=p.get("tolerance", suites.DECAY_TOLERANCE),
        )
    if cfg.command == "verify-riesz":
        return suites.riesz_suite(
            cfg.seed,
            fields=p.get("fields", 100),
            identity_tol=p.get("identity_tol", suites.RIESZ_IDENTITY_TOL),
            probe_budget=p.get("probe_budget", suites.RIESZ_PROBE_BUDGET),
        )
    if cfg.command == "verify-bilinear":
        return suites.bilinear_suite(
            cfg.seed, budget=p.get("budget", suites.BILINEAR_BUDGET)
        )
    if cfg.command == "scaling-check":
        return suites.scaling_suite(
            cfg.seed,
            cases_per_dim=p.get("cases_per_dim", 20),
            dims=tuple(p.get("dims", (1, 2, 3))),
            tolerance=p.get("tolerance", suites.SCALING_TOLERANCE),
        )
    if cfg.command == "solve":
        solver = build_solver_config(p)
        grid_spec = (
            p.get("grid_size", suites.SOLVE_GRID[0]),
            p.get("half_width", suites.SOLVE_GRID[1]),
        )
        return suites.solve_suite(
            amplitude=p.get("amplitude", suites.SOLVE_AMPLITUDE),
            compare_oracle=p.get("compare_oracle", True),
            cfg=solver,
            grid_spec=grid_spec,
            oracle_steps=p.get("oracle_steps", suites.SOLVE_ORACLE_STEPS),
        )
    if cfg.command == "local-solve":
        solver = build_solver_config(p)
        grid_spec = (
            p.get("grid_size", suites.SOLVE_GRID[0]),
            p.get("half_width", suites.SOLVE_GRID[1]),
        )
        return suites.local_suite(
            amplitude=p.get(
                "amplitude", suites.SOLVE_AMPLITUDE * suites.LOCAL_FACTOR
            ),
            cfg=solver,
            grid_spec=grid_spec,
            max_halvings=p.get("max_halvings", 60),
        )
    if cfg.command == "aniso-demo":
        return suites.aniso_suite()
    raise ConfigError(f"unknown command {cfg.command!r}")


def _save_solver_artifacts(report: dict, out_dir: str) -> None:
    traj = report.get("_trajectory")
    cert = report.get("_certificate")
    if traj is not None:
        save_trajectory(traj, os.path.join(out_dir, "trajectory"))
    if cert is not None:
        path = os.path.join(out_dir, "certificate.json")
        with open(path, "w", encoding="ascii") as fh:
            fh.write(json.dumps(cert.to_dict(), sort_keys=True, indent=2) + "\n")


def _run(args) -> int:
    try:
        cfg = ExperimentConfig.load(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        cfg.validate()
    except ConfigError as exc:
        print(f"mnns: configuration error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out if args.out is not None else "mnns-report"
    start = time.perf_counter()
    try:
        report = _dispatch(cfg)
    except MnnsError as exc:
        report = {
            "command": cfg.command,
            "seed": cfg.seed,
            "config_digest": cfg.digest,
            "error": f"{type(exc).__name__}: {exc}",
            "passed": False,
        }
        write_report(report, out_dir)
        print(f"mnns: {report['error']}", file=sys.stderr)
        return 1
    report["config_digest"] = cfg.digest
    report["wall_clock_seconds"] = time.perf_counter() - start
    os.makedirs(out_dir, exist_ok=True)
    _save_solver_artifacts(report, out_dir)
    json_path, _ = write_report(report, out_dir)
    status = "PASS" if report["passed"] else "FAIL"
    print(f"{cfg.command}: {status} ({json_path})")
    return 0 if report["passed"] else 1


def _preset(args) -> int:
    try:
        text = preset_text(args.name)
    except ConfigError as exc:
        print(f"mnns: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return 0


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="mnns",
        description="Mixed-norm analysis and small-data mild solutions.",
        epilog="Set MNNS_THREADS to cap transform worker threads.",
    )
    parser.add_argument(
        "--version", action="version", version=f"mnns {__version__}"
    )
    sub = parser.add_subparsers(dest="subcommand")
    run_p = sub.add_parser("run", help="execute a TOML experiment config")
    run_p.add_argument("--config", required=True, help="path to the TOML file")
    run_p.add_argument("--out", help="report directory (default: mnns-report)")
    run_p.add_argument("--seed", type=int, help="override the config seed")
    pre_p = sub.add_parser("preset", help="print a canned config to stdout")
    pre_p.add_argument("name", help="preset name")
    args = parser.parse_args(argv)
    if args.subcommand == "run":
        return _run(args)
    if args.subcommand == "preset":
        return _preset(args)
    parser.print_help(sys.stderr)
    return 2
