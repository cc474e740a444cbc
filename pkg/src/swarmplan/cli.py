"""Command-line front end: plan, compare, validate, scenario dump.

Exit codes: 0 success, 2 scenario validation/parse problem, 3 I/O problem,
4 configuration problem (bad flags or optimizer settings). Result files are
written atomically (write-then-rename) and are byte-identical across reruns
with the same flags, except the timestamps block of the manifest.
"""

from __future__ import annotations

import argparse
import datetime
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .planner import evaluate_plan, plan_game, plan_rigid
from .scenario import (
    BUILTIN_IDS,
    Scenario,
    ScenarioFormatError,
    ScenarioValidationError,
    builtin_scenario,
    load_scenario,
    scenario_to_dict,
    scenario_to_yaml,
)
from .spso import ConfigError, PsoConfig

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_CONFIG = 4

DESK_PARTICLES = 500
DESK_ITERATIONS = 300
PAPER_PARTICLES = 2000
PAPER_ITERATIONS = 1500


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; remap them to the config code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_CONFIG)


def _fmt(x) -> str:
    return repr(float(x))


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def _resolve_scenario(spec: str):
    """Return (scenario, source_label). builtin:<id> selects a bundled one."""
    if spec.startswith("builtin:"):
        ident = spec.split(":", 1)[1]
        if ident not in BUILTIN_IDS:
            raise ConfigError(
                f"unknown builtin scenario {ident!r}; choose from {', '.join(BUILTIN_IDS)}"
            )
        return builtin_scenario(ident), spec
    return load_scenario(spec), spec


def _build_config(args) -> PsoConfig:
    particles = args.particles
    iterations = args.iterations
    if particles is None:
        particles = PAPER_PARTICLES if args.paper_budget else DESK_PARTICLES
    if iterations is None:
        iterations = PAPER_ITERATIONS if args.paper_budget else DESK_ITERATIONS
    return PsoConfig(n_pop=particles, max_it=iterations, seed=getattr(args, "seed", 0))


def _check_threads(threads: int) -> int:
    if threads < 1:
        raise ConfigError("--threads must be at least 1")
    return threads


def _manifest(command: str, source: str, scenario: Scenario, cfg: PsoConfig,
              extra: dict, outputs: list, wall_time: float) -> dict:
    return {
        "tool": {"name": "swarmplan", "version": __version__},
        "command": command,
        "scenario": {"source": source, "content": scenario_to_dict(scenario)},
        "config": asdict(cfg),
        **extra,
        "outputs": outputs,
        "timestamps": {
            "created_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "wall_time_s": float(wall_time),
        },
    }


def _paths_table(allocation) -> str:
    lines = ["vehicle\twaypoint\tx\ty\tz"]
    for n, path in enumerate(allocation):
        for k, (x, y, z) in enumerate(path):
            lines.append(f"{n}\t{k}\t{_fmt(x)}\t{_fmt(y)}\t{_fmt(z)}")
    return "\n".join(lines) + "\n"


def _history_table(history) -> str:
    n = history.shape[1]
    lines = ["iteration\t" + "\t".join(f"cost_{i}" for i in range(n))]
    for it, row in enumerate(history):
        lines.append(f"{it}\t" + "\t".join(_fmt(c) for c in row))
    return "\n".join(lines) + "\n"


def _metrics_doc(metrics) -> dict:
    return {
        "feasible": bool(metrics.feasible),
        "min_separation": float(metrics.min_separation),
        "min_threat_clearance": float(metrics.min_threat_clearance),
        "vehicles": [
            {
                "index": i,
                "path_length": float(metrics.path_lengths[i]),
                "single_cost": float(metrics.single_costs[i]),
                "formation_cost": float(metrics.formation_costs[i]),
                "total_cost": float(metrics.total_costs[i]),
                "log_cost": float(metrics.log_costs[i]),
                "feasible": bool(metrics.vehicle_feasible[i]),
            }
            for i in range(len(metrics.total_costs))
        ],
    }


def _dump_yaml(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def cmd_plan(args) -> int:
    scenario, source = _resolve_scenario(args.scenario)
    cfg = _build_config(args)
    threads = _check_threads(args.threads)
    planner = plan_game if args.algo == "game" else plan_rigid
    result = planner(scenario, cfg, threads=threads)
    metrics = evaluate_plan(result, scenario)

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = ["paths.tsv", "cost_history.tsv", "metrics.yaml"]
    _write_atomic(outdir / "paths.tsv", _paths_table(result.best_allocation))
    _write_atomic(outdir / "cost_history.tsv", _history_table(result.history))
    _write_atomic(outdir / "metrics.yaml", _dump_yaml(_metrics_doc(metrics)))
    manifest = _manifest(
        "plan", source, scenario, cfg,
        {"algo": args.algo, "threads": threads},
        outputs, result.wall_time,
    )
    _write_atomic(outdir / "manifest.yaml", _dump_yaml(manifest))

    costs = ", ".join(f"cost[{i}]={_fmt(c)}" for i, c in enumerate(result.best_costs))
    print(f"{args.algo} plan for {source} (seed {cfg.seed}): {costs}")
    print(f"feasible: {'yes' if metrics.feasible else 'no'}; results in {outdir}")
    return EXIT_OK


def _parse_seeds(text: str):
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ConfigError(f"--seeds expects an integer count or comma list, got {text!r}")
    if any(v < 0 for v in values):
        raise ConfigError("--seeds values must be nonnegative")
    if "," not in text:
        if not values:
            raise ConfigError("--seeds must not be empty")
        return list(range(values[0])) if values[0] > 0 else []
    return values


def cmd_compare(args) -> int:
    scenario, source = _resolve_scenario(args.scenario)
    base_cfg = _build_config(args)
    threads = _check_threads(args.threads)
    seeds = _parse_seeds(args.seeds)
    if not seeds:
        raise ConfigError("--seeds produced an empty seed list")

    n = scenario.n_vehicles
    rows = []
    wall = 0.0
    for seed in seeds:
        cfg = replace(base_cfg, seed=seed)
        game = plan_game(scenario, cfg, threads=threads)
        rigid = plan_rigid(scenario, cfg, threads=threads)
        wall += game.wall_time + rigid.wall_time
        gm = evaluate_plan(game, scenario)
        rm = evaluate_plan(rigid, scenario)
        g_total = float(game.best_costs.sum())
        r_total = float(rigid.best_costs.sum())
        rows.append((seed, gm, g_total, rm, r_total))

    header = (
        ["seed"]
        + [f"game_log_{i}" for i in range(n)]
        + ["game_total", "game_feasible"]
        + [f"rigid_log_{i}" for i in range(n)]
        + ["rigid_total", "rigid_feasible", "winner"]
    )
    lines = ["\t".join(header)]
    wins = 0
    gaps = []
    for seed, gm, g_total, rm, r_total in rows:
        win = g_total <= r_total
        wins += int(win)
        if np.isfinite(g_total) and np.isfinite(r_total) and g_total > 0 and r_total > 0:
            gaps.append(float(np.log(r_total) - np.log(g_total)))
        lines.append(
            "\t".join(
                [str(seed)]
                + [_fmt(c) for c in gm.log_costs]
                + [_fmt(g_total), "yes" if gm.feasible else "no"]
                + [_fmt(c) for c in rm.log_costs]
                + [_fmt(r_total), "yes" if rm.feasible else "no",
                   "game" if win else "rigid"]
            )
        )

    summary = {
        "seeds": list(seeds),
        "game_wins": wins,
        "game_win_rate": float(wins / len(seeds)),
        "mean_log_total_gap": float(np.mean(gaps)) if gaps else None,
        "comparable_seeds": len(gaps),
    }

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = ["compare.tsv", "summary.yaml"]
    _write_atomic(outdir / "compare.tsv", "\n".join(lines) + "\n")
    _write_atomic(outdir / "summary.yaml", _dump_yaml(summary))
    manifest = _manifest(
        "compare", source, scenario, base_cfg,
        {"seeds": list(seeds), "threads": threads},
        outputs, wall,
    )
    _write_atomic(outdir / "manifest.yaml", _dump_yaml(manifest))

    print(
        f"compare on {source}: game wins {wins}/{len(seeds)}"
        + (f", mean log-total gap {summary['mean_log_total_gap']:.4f}" if gaps else "")
    )
    print(f"results in {outdir}")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        _resolve_scenario(args.scenario)
    except ScenarioValidationError as exc:
        for v in exc.violations:
            print(v)
        return EXIT_VALIDATION
    print("ok: no violations")
    return EXIT_OK


def cmd_scenario_dump(args) -> int:
    ident = args.id.split(":", 1)[1] if args.id.startswith("builtin:") else args.id
    if ident not in BUILTIN_IDS:
        raise ConfigError(
            f"unknown builtin scenario {ident!r}; choose from {', '.join(BUILTIN_IDS)}"
        )
    text = scenario_to_yaml(builtin_scenario(ident))
    if args.out:
        target = Path(args.out)
        if target.parent and not target.parent.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
        _write_atomic(target, text)
        print(f"wrote {target}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_run_flags(p, with_algo: bool):
    p.add_argument("--scenario", required=True,
                   help="scenario file path or builtin:<id>")
    if with_algo:
        p.add_argument("--algo", choices=("game", "rigid"), default="game")
    p.add_argument("--particles", type=int, default=None,
                   help=f"swarm size (default {DESK_PARTICLES})")
    p.add_argument("--iterations", type=int, default=None,
                   help=f"iteration budget (default {DESK_ITERATIONS})")
    p.add_argument("--paper-budget", action="store_true",
                   help=f"use {PAPER_PARTICLES} particles x {PAPER_ITERATIONS} iterations")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap for cost evaluation; never changes results")


def build_parser() -> _Parser:
    parser = _Parser(prog="swarmplan",
                     description="cooperative multi-vehicle path planning")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="plan one scenario and write result files")
    _add_run_flags(p_plan, with_algo=True)
    p_plan.add_argument("--seed", type=int, default=0)
    p_plan.add_argument("--out", default="runs/plan", help="output directory")
    p_plan.set_defaults(func=cmd_plan)

    p_cmp = sub.add_parser("compare", help="paired game vs rigid-baseline runs")
    _add_run_flags(p_cmp, with_algo=False)
    p_cmp.add_argument("--seeds", default="5",
                       help="integer count (N -> seeds 0..N-1) or comma list")
    p_cmp.add_argument("--out", default="runs/compare", help="output directory")
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="list every scenario rule violation")
    p_val.add_argument("--scenario", required=True,
                       help="scenario file path or builtin:<id>")
    p_val.set_defaults(func=cmd_validate)

    p_scn = sub.add_parser("scenario", help="scenario tooling")
    scn_sub = p_scn.add_subparsers(dest="scenario_command", required=True)
    p_dump = scn_sub.add_parser("dump", help="print or write a builtin scenario file")
    p_dump.add_argument("id", help="builtin scenario id (scenario1, scenario2)")
    p_dump.add_argument("--out", default=None, help="target file (stdout if omitted)")
    p_dump.set_defaults(func=cmd_scenario_dump)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ScenarioValidationError as exc:
        for v in exc.violations:
            sys.stderr.write(f"error: {v}\n")
        return EXIT_VALIDATION
    except ScenarioFormatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_VALIDATION
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_IO


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
