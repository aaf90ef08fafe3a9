"""Policy evaluation through the bridge and benchmark-row output.

Rows use the same CSV schema the simulator's own benchmark writes
(approach, mean_execution_time_s, success_fraction, episodes) so tables
from both sides can be concatenated.
"""

from __future__ import annotations

import csv
import random
import time
from dataclasses import dataclass
from typing import Callable, Sequence

from .client import BridgeClient

Policy = Callable[[list[float]], int]


@dataclass
class EpisodeRecord:
    seed: int
    outcome: str
    steps: int
    undiscounted_return: float
    mean_decision_time: float


@dataclass
class EvalRow:
    label: str
    mean_execution_time: float
    success_fraction: float
    episodes: int


def rollout(client: BridgeClient, policy: Policy, seed: int) -> EpisodeRecord:
    """One episode under the given policy; the return sums step rewards."""
    state = client.reset(seed=seed)
    total = 0.0
    steps = 0
    decision_time = 0.0
    while not state["done"]:
        t0 = time.perf_counter()
        action = policy(state["obs"])
        decision_time += time.perf_counter() - t0
        state = client.step(action)
        total += state["reward"]
        steps += 1
    return EpisodeRecord(
        seed=seed,
        outcome=state["outcome"],
        steps=steps,
        undiscounted_return=total,
        mean_decision_time=decision_time / max(steps, 1),
    )


def evaluate(
    client: BridgeClient, policy: Policy, seeds: Sequence[int], label: str
) -> tuple[EvalRow, list[EpisodeRecord]]:
    records = [rollout(client, policy, seed) for seed in seeds]
    successes = sum(1 for r in records if r.outcome == "reached_goal")
    row = EvalRow(
        label=label,
        mean_execution_time=sum(r.mean_decision_time for r in records) / len(records),
        success_fraction=successes / len(records),
        episodes=len(records),
    )
    return row, records


def random_policy(n_actions: int, rng_seed: int) -> Policy:
    rng = random.Random(rng_seed)

    def pick(_obs: list[float]) -> int:
        return rng.randrange(n_actions)

    return pick


def mean_return(records: Sequence[EpisodeRecord]) -> float:
    return sum(r.undiscounted_return for r in records) / len(records)


def write_rows(rows: Sequence[EvalRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["approach", "mean_execution_time_s", "success_fraction", "episodes"])
        for row in rows:
            w.writerow(
                [row.label, f"{row.mean_execution_time:.6f}", repr(row.success_fraction), row.episodes]
            )


def write_curve(curve: Sequence[tuple[int, float]], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["env_step", "eval_return"])
        for step, ret in curve:
            w.writerow([step, repr(ret)])
