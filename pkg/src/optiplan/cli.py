"""Command-line entry point: scenario generation, single-shot planning,
benchmark suites, and the bridge server.

Exit codes: 0 success, 1 failed --assert gate, 2 usage or config error.
Config file layout is documented in docs/FORMATS.md.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

from . import bridge, evaluation, planner, task, world3d
from .dynamics import DynamicsParams, State


class ConfigError(ValueError):
    pass


_VEC_FIELDS = {"theta", "bounds_min", "bounds_max", "start"}


def _dataclass_from_dict(cls, doc: dict, context: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{context}: expected an object")
    known = {f.name for f in fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{context}: unknown fields {sorted(unknown)}")
    kwargs = {}
    for key, value in doc.items():
        if key in _VEC_FIELDS:
            value = tuple(float(v) for v in value)
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context}: {exc}") from exc


@dataclass
class RunConfig:
    generation: world3d.GenConfig
    dynamics: DynamicsParams
    task: task.TaskConfig
    plan: planner.PlanConfig
    scenario_path: str | None
    bench_seeds: list[int]
    approaches: list[evaluation.Approach]
    out_dir: str


def load_run_config(path: str | None) -> RunConfig:
    doc = {}
    if path is not None:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    known = {"generation", "dynamics", "task", "plan", "scenario_path", "bench", "out_dir"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{path}: unknown fields {sorted(unknown)}")
    gen_cfg = _dataclass_from_dict(world3d.GenConfig, doc.get("generation", {}), "generation")
    dyn = _dataclass_from_dict(DynamicsParams, doc.get("dynamics", {}), "dynamics")
    task_cfg = _dataclass_from_dict(task.TaskConfig, doc.get("task", {}), "task")
    plan_cfg = _dataclass_from_dict(planner.PlanConfig, doc.get("plan", {}), "plan")
    bench = doc.get("bench", {})
    if not isinstance(bench, dict):
        raise ConfigError("bench: expected an object")
    unknown = set(bench) - {"seeds", "seed_start", "episodes", "approaches"}
    if unknown:
        raise ConfigError(f"bench: unknown fields {sorted(unknown)}")
    if "seeds" in bench:
        seeds = [int(s) for s in bench["seeds"]]
    else:
        start = int(bench.get("seed_start", 0))
        seeds = list(range(start, start + int(bench.get("episodes", 100))))
    approaches = []
    for entry in bench.get("approaches", []):
        unknown = set(entry) - {"label", "plan"}
        if unknown:
            raise ConfigError(f"bench.approaches: unknown fields {sorted(unknown)}")
        a_plan = _dataclass_from_dict(planner.PlanConfig, entry.get("plan", {}), "bench.approaches.plan")
        approaches.append(evaluation.Approach(label=entry["label"], plan_cfg=a_plan))
    if not approaches:
        approaches = [evaluation.Approach(label=plan_cfg.mode, plan_cfg=plan_cfg)]
    scenario_path = doc.get("scenario_path")
    if scenario_path is not None and not Path(scenario_path).exists():
        raise ConfigError(f"scenario_path {scenario_path} does not exist")
    return RunConfig(
        generation=gen_cfg,
        dynamics=dyn,
        task=task_cfg,
        plan=plan_cfg,
        scenario_path=scenario_path,
        bench_seeds=seeds,
        approaches=approaches,
        out_dir=doc.get("out_dir", "."),
    )


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    plan_cfg = cfg.plan
    if args.budget is not None:
        plan_cfg = replace(plan_cfg, budget=args.budget)
    if args.gamma is not None:
        plan_cfg = replace(plan_cfg, gamma=args.gamma)
    if getattr(args, "mode", None) is not None:
        plan_cfg = replace(plan_cfg, mode=args.mode)
    cfg.plan = plan_cfg
    if getattr(args, "out", None) is not None:
        cfg.out_dir = args.out
    return cfg


def cmd_gen(args) -> int:
    cfg = load_run_config(args.config)
    out_dir = Path(args.out or cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for seed in range(args.seed, args.seed + args.count):
        scenario = world3d.generate_scenario(seed, cfg.generation)
        path = out_dir / f"scenario_{seed}.json"
        world3d.save_scenario(scenario, path)
        print(f"wrote {path}")
    return 0


def cmd_plan(args) -> int:
    cfg = _apply_overrides(load_run_config(args.config), args)
    if args.scenario is not None:
        scenario = world3d.load_scenario(args.scenario)
    elif cfg.scenario_path is not None:
        scenario = world3d.load_scenario(cfg.scenario_path)
    else:
        scenario = world3d.generate_scenario(args.seed, cfg.generation)
    world = world3d.SpatialIndex(scenario)
    x0 = State(p=scenario.start, v=(0.0, 0.0, 0.0))
    traj = planner.replan_horizon(x0, world, cfg.dynamics, cfg.task, cfg.plan)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    traj_path = out_dir / "trajectory.csv"
    with open(traj_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "px", "py", "pz", "vx", "vy", "vz", "action", "reward"])
        for t, s in enumerate(traj.steps, start=1):
            w.writerow([t, *map(repr, s.state.p), *map(repr, s.state.v), s.action, repr(s.reward)])
    print(
        f"{traj.outcome.value} steps={len(traj.steps)} "
        f"mean_plan_time={traj.mean_plan_time:.4f}s trajectory={traj_path}"
    )
    return 0


_ASSERT_RE = re.compile(r"^success\s*>=\s*([0-9.]+)$")


def cmd_bench(args) -> int:
    cfg = _apply_overrides(load_run_config(args.config), args)
    seeds = cfg.bench_seeds
    if args.episodes is not None:
        seeds = seeds[: args.episodes] if len(seeds) >= args.episodes else list(
            range(seeds[0] if seeds else 0, (seeds[0] if seeds else 0) + args.episodes)
        )
    table = evaluation.benchmark(
        seeds,
        cfg.approaches,
        gen_cfg=cfg.generation,
        dyn=cfg.dynamics,
        task_cfg=cfg.task,
        workers=args.workers,
    )
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    evaluation.write_bench_table(table, out_dir / "bench_table.csv")
    evaluation.write_episode_records(table, out_dir / "bench_episodes.csv")
    for row in table.rows:
        print(
            f"{row.label}: success_fraction={row.success_fraction:.3f} "
            f"mean_execution_time={row.mean_execution_time:.4f}s episodes={row.episodes}"
        )
    if args.assert_expr:
        m = _ASSERT_RE.match(args.assert_expr)
        if not m:
            raise ConfigError(f"unsupported --assert expression {args.assert_expr!r}")
        threshold = float(m.group(1))
        worst = min(row.success_fraction for row in table.rows)
        if worst < threshold:
            print(f"ASSERT FAILED: success fraction {worst:.3f} < {threshold}", file=sys.stderr)
            return 1
    return 0


def cmd_serve(args) -> int:
    cfg = load_run_config(args.config)
    bcfg = bridge.BridgeConfig(gen_cfg=cfg.generation, dyn=cfg.dynamics, task_cfg=cfg.task)
    if args.socket:
        host, _, port = args.socket.rpartition(":")
        try:
            server = bridge.serve_tcp(bcfg, host or "127.0.0.1", int(port))
        except OSError as exc:
            print(f"cannot bind {args.socket}: {exc}", file=sys.stderr)
            return 2
        print(f"listening on {server.server_address[0]}:{server.server_address[1]}", flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.shutdown()
        return 0
    bridge.serve_stdio(bcfg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="optiplan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate seeded scenario files")
    g.add_argument("--config", default=None)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    pl = sub.add_parser("plan", help="plan one scenario end to end")
    pl.add_argument("--config", default=None)
    pl.add_argument("--scenario", default=None)
    pl.add_argument("--seed", type=int, default=0)
    pl.add_argument("--budget", type=int, default=None)
    pl.add_argument("--gamma", type=float, default=None)
    pl.add_argument("--mode", choices=["uniform", "optimistic"], default=None)
    pl.add_argument("--out", default=None)
    pl.set_defaults(func=cmd_plan)

    b = sub.add_parser("bench", help="run the benchmark suite")
    b.add_argument("--config", default=None)
    b.add_argument("--episodes", type=int, default=None)
    b.add_argument("--budget", type=int, default=None)
    b.add_argument("--gamma", type=float, default=None)
    b.add_argument("--mode", choices=["uniform", "optimistic"], default=None)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--assert", dest="assert_expr", default=None, metavar="EXPR",
                   help="gate on results, e.g. 'success>=0.9'")
    b.add_argument("--out", default=None)
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("serve", help="serve the bridge protocol")
    s.add_argument("--config", default=None)
    s.add_argument("--socket", default=None, metavar="HOST:PORT",
                   help="serve over TCP instead of standard streams")
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, world3d.ParseError, world3d.InvariantViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except world3d.GenerationInfeasible as exc:
        print(f"error: generation infeasible: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
