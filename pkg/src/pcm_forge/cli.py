"""Command-line front end: simulate, optimize, compare.

Every run writes a self-describing output directory: the trajectory and
objective files, a copy of the effective config, and a manifest recording
the command, options, seed, tool version and wall-clock time.  Re-running
the command recorded in a manifest (same config and seed) reproduces the
data files byte for byte.

Exit codes: 0 ok, 2 missing input, 3 validation error, 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import __version__
from .errors import ConfigError, PcmForgeError, ProfileFormatError, SolverEvalError, ValidationError
from .objective import evaluate as evaluate_objectives, load_breakdown_json, write_breakdown_json
from .scenario import (
    RunConfig,
    default_case_study,
    default_design,
    load_config,
    load_profile_csv,
    save_config,
)
from .simulate import ControlSequence, rollout, write_trajectory_csv
from .solver import SolveOptions, solve, verify
from .transcription import assemble

EXIT_OK = 0
EXIT_MISSING = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4

COMPARE_COLUMNS = ("J_ie", "J_ce", "J_cv_d", "J_cv_pcm", "J_m", "J_nom", "J_d", "J_s", "J_tot")


def _write_manifest(out_dir: Path, command: str, config_name: str, options: dict,
                    seed, started: float) -> None:
    manifest = {
        "schema_version": 1,
        "command": command,
        "config": config_name,
        "options": options,
        "out_dir": str(out_dir),
        "tool_version": __version__,
        "seed": seed,
        "wall_clock_s": round(time.time() - started, 3),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )


def _load_run_config(args) -> RunConfig:
    if args.config is not None:
        cfg = load_config(args.config)
    else:
        cfg = RunConfig(scenario=default_case_study(), design=default_design(), solver={})
    if args.profile is not None:
        profile = load_profile_csv(args.profile)
        scenario = replace(cfg.scenario, profile=profile)
        cfg = RunConfig(scenario=scenario, design=cfg.design, solver=cfg.solver)
    return cfg


def _solver_options(cfg: RunConfig, args) -> SolveOptions:
    opts = dict(cfg.solver)
    if args.starts is not None:
        opts["n_starts"] = args.starts
    if args.seed is not None:
        opts["seed"] = args.seed
    known = {k: v for k, v in opts.items() if k in SolveOptions.__dataclass_fields__}
    return SolveOptions(**known)


def _prepare_out(args, cfg: RunConfig) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.config is not None:
        shutil.copyfile(args.config, out_dir / "config.cfg")
    else:
        save_config(cfg, out_dir / "config.cfg")
    return out_dir


def cmd_simulate(args) -> int:
    started = time.time()
    cfg = _load_run_config(args)
    if cfg.scenario.policy.kind != "all_fixed":
        raise ValidationError(
            "simulate requires an all_fixed control policy; "
            f"got {cfg.scenario.policy.kind!r} (use optimize instead)"
        )
    out_dir = _prepare_out(args, cfg)
    controls = ControlSequence.from_policy(cfg.scenario)
    traj = rollout(cfg.scenario, cfg.design, controls)
    breakdown = evaluate_objectives(traj, cfg.design, cfg.scenario.weights)
    write_trajectory_csv(traj, out_dir / "trajectory.csv")
    write_breakdown_json(breakdown, cfg.scenario.weights, out_dir / "objectives.json")
    _write_manifest(out_dir, "simulate", args.config or "<default>",
                    {"profile": args.profile}, None, started)
    print(f"simulated {traj.N} knots -> {out_dir}")
    return EXIT_OK


def cmd_optimize(args) -> int:
    started = time.time()
    cfg = _load_run_config(args)
    options = _solver_options(cfg, args)
    out_dir = _prepare_out(args, cfg)
    problem = assemble(cfg.scenario, nominal_design=cfg.design)
    result = solve(problem, options)
    if result.status == "eval-failure":
        raise SolverEvalError("all starts failed evaluation")

    design, controls, _ = problem.decode(result.z_star)
    traj = rollout(cfg.scenario, design, controls)
    breakdown = evaluate_objectives(traj, design, cfg.scenario.weights)
    write_trajectory_csv(traj, out_dir / "trajectory.csv")
    write_breakdown_json(breakdown, cfg.scenario.weights, out_dir / "objectives.json")
    (out_dir / "result.json").write_text(result.to_json() + "\n", encoding="utf-8")
    (out_dir / "solve_log.txt").write_text(
        "\n".join(result.log) + "\n", encoding="utf-8"
    )
    diagnostics = verify(problem, result)
    (out_dir / "verify.json").write_text(
        json.dumps(diagnostics, indent=2) + "\n", encoding="utf-8"
    )
    _write_manifest(out_dir, "optimize", args.config or "<default>",
                    {"n_starts": options.n_starts, "profile": args.profile},
                    options.seed, started)
    print(
        f"{result.status}: J_tot={breakdown.J_tot:.6g}  "
        f"C_pcm={design.C_pcm:.6g} J  T_m={design.T_m:.4g} degC  -> {out_dir}"
    )
    if result.status == "infeasible":
        print("warning: best start violates constraints beyond tolerance")
    return EXIT_OK


def _format_row(label: str, values: list[str]) -> str:
    return f"{label:<18}" + "".join(f"{v:>12}" for v in values)


def cmd_compare(args) -> int:
    runs = []
    for run_dir in args.runs:
        path = Path(run_dir) / "objectives.json"
        if not path.exists():
            raise FileNotFoundError(f"no objectives.json under {run_dir}")
        breakdown, _ = load_breakdown_json(path)
        runs.append((Path(run_dir).name or str(run_dir), breakdown))
    if len(runs) < 2:
        raise ValidationError("compare needs at least two run directories")

    lines = [_format_row("run", list(COMPARE_COLUMNS))]
    for name, b in runs:
        lines.append(_format_row(name[:18], [f"{getattr(b, c):.3g}" for c in COMPARE_COLUMNS]))
    first = runs[0][1]
    for i, (name, b) in enumerate(runs, start=1):
        vals = []
        for c in COMPARE_COLUMNS:
            denom = getattr(b, c)
            num = getattr(first, c)
            if num == denom:  # covers identical runs, including 0/0 columns
                vals.append("1")
            elif denom == 0.0:
                vals.append("--")
            else:
                vals.append(f"{num / denom:.3g}")
        lines.append(_format_row(f"R1/R{i}", vals))
    lines.append(
        "note: each ratio row divides the first run's value by that run's value;"
    )
    lines.append(
        "for cost terms a ratio above 1.00 favors the later run. J_ce is a negated"
    )
    lines.append(
        "reward (benefit-inverted): there a ratio below 1.00 favors the later run."
    )
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcm-forge",
        description="Simulate and optimize a PCM-buffered active cooling loop.",
    )
    parser.add_argument("--version", action="version", version=f"pcm-forge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="scenario config file")
    common.add_argument("--out", default="runs/out", help="output directory")
    common.add_argument("--seed", type=int, default=None, help="solver RNG seed")
    common.add_argument("--starts", type=int, default=None, help="multi-start count")
    common.add_argument("--profile", default=None, help="override profile CSV")

    sub.add_parser("simulate", parents=[common], help="roll the fixed policy forward")
    sub.add_parser("optimize", parents=[common], help="solve the design/control program")
    cmp_p = sub.add_parser("compare", help="tabulate objectives across run dirs")
    cmp_p.add_argument("runs", nargs="+", help="completed run directories")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "optimize":
            return cmd_optimize(args)
        return cmd_compare(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (ConfigError, ProfileFormatError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except SolverEvalError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except PcmForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
