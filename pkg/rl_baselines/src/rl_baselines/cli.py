"""Train and evaluate baseline agents from the command line.

    rl-baselines train --algorithm dqn --steps 50000 --out runs/dqn
    rl-baselines eval --checkpoint runs/dqn/checkpoint.pt --episodes 20
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import checkpoint as ckpt
from .client import BridgeClient
from .config import AgentConfig
from .dqn import train_dqn
from .evaluate import evaluate, write_curve, write_rows
from .ppo import train_ppo


def cmd_train(args) -> int:
    cfg = AgentConfig(
        algorithm=args.algorithm,
        seed=args.seed,
        total_steps=args.steps,
        gamma=args.gamma,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with BridgeClient(config_path=args.bridge_config) as client:
        trainer = train_ppo if cfg.algorithm == "ppo" else train_dqn
        result = trainer(cfg, client, train_seed=args.train_seed)
    ckpt.save_checkpoint(result, out / "checkpoint.pt")
    write_curve(result.curve, out / "curve.csv")
    last_step, last_return = result.curve[-1]
    print(f"{cfg.algorithm}: {last_step} steps, final eval return {last_return:.3f}")
    return 0


def cmd_eval(args) -> int:
    result = ckpt.load_checkpoint(args.checkpoint)
    with BridgeClient(config_path=args.bridge_config) as client:
        policy = ckpt.policy_from_result(result, client.obs_len, client.action_count)
        seeds = range(args.seed_start, args.seed_start + args.episodes)
        row, _records = evaluate(client, policy, list(seeds), result.config.algorithm)
    if args.out:
        write_rows([row], args.out)
    print(
        f"{row.label}: success_fraction={row.success_fraction:.3f} "
        f"mean_execution_time={row.mean_execution_time:.6f}s episodes={row.episodes}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rl-baselines", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train an agent against a bridge server")
    t.add_argument("--algorithm", choices=("dqn", "dqn_dueling", "ppo"), default="dqn")
    t.add_argument("--steps", type=int, default=AgentConfig.total_steps)
    t.add_argument("--gamma", type=float, default=AgentConfig.gamma)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--train-seed", type=int, default=0, help="scenario seed used for training episodes")
    t.add_argument("--bridge-config", default=None, help="run config passed to the server")
    t.add_argument("--out", default="runs/agent")
    t.set_defaults(fn=cmd_train)

    e = sub.add_parser("eval", help="roll out a checkpoint over seeded scenarios")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--episodes", type=int, default=20)
    e.add_argument("--seed-start", type=int, default=0)
    e.add_argument("--bridge-config", default=None)
    e.add_argument("--out", default=None, help="CSV path for the benchmark row")
    e.set_defaults(fn=cmd_eval)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
