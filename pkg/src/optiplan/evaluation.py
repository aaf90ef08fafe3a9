"""Oracles and experiment metrics: exhaustive truncated Q-values, action
regret, worst-case robust return, and the success-fraction benchmark.

The exhaustive oracle enumerates the full K-ary tree layer by layer with
numpy, so depth-8 instances stay affordable."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import ACTIONS, K, DynamicsParams, State, axis_coeffs, step
from .planner import PlanConfig, replan_horizon
from .task import Outcome, TaskConfig, reward
from .world3d import GenConfig, Scenario, SpatialIndex, generate_scenario

_NODE_GUARD = 10**7


class BudgetExceeded(RuntimeError):
    """The requested exhaustive depth would enumerate more than the guard."""


def _children_all_actions(states: np.ndarray, dyn: DynamicsParams) -> np.ndarray:
    """All K children of each state row, parent-major / action-minor.

    states: (N, 6) rows [px py pz vx vy vz]; returns (N*K, 6).
    Uses the same per-axis step coefficients as the scalar `dynamics.step`.
    """
    coeffs = axis_coeffs(dyn)
    e = np.array([c[0] for c in coeffs])
    b = np.array([c[1] for c in coeffs])
    c_ = np.array([c[2] for c in coeffs])
    p = states[:, :3]
    v = states[:, 3:]
    base_p = p + v * b
    base_v = v * e
    out = np.empty((states.shape[0], K, 6))
    for a, u in enumerate(ACTIONS):
        ua = dyn.beta * np.array(u, dtype=float)
        out[:, a, :3] = base_p + ua * c_
        out[:, a, 3:] = base_v + ua * b
    return out.reshape(-1, 6)


def _batch_rewards(positions: np.ndarray, scenario: Scenario, cfg: TaskConfig) -> np.ndarray:
    """Vectorized task reward at each position row."""
    d_s = np.full(positions.shape[0], np.inf)
    # One obstacle at a time keeps the temporaries at O(N) instead of
    # O(N * n_obstacles) for the deep layers.
    for ob in scenario.obstacles:
        diff = positions - np.array(ob.center)
        np.minimum(d_s, np.sqrt(np.einsum("ij,ij->i", diff, diff)) - ob.radius, out=d_s)
    diff = positions - np.array(scenario.goal)
    goal_dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    delta = np.where(d_s < cfg.obs_d, 0.0, np.minimum(d_s, cfg.delta_max) / cfg.delta_max)
    return delta / (1.0 + goal_dist)


def exhaustive_q(
    x: State,
    depth: int,
    scenario: Scenario,
    dyn: DynamicsParams,
    task_cfg: TaskConfig,
    gamma: float,
) -> np.ndarray:
    """Truncated optimal Q-values at x for every action, by full enumeration
    of the depth-`depth` tree and a backward max-backup."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if K**depth > _NODE_GUARD:
        raise BudgetExceeded(f"K^{depth} = {K**depth} exceeds the {_NODE_GUARD} node guard")
    states = np.array([[*x.p, *x.v]])
    layer_rewards = []
    for _ in range(depth):
        states = _children_all_actions(states, dyn)
        layer_rewards.append(_batch_rewards(states[:, :3], scenario, task_cfg))
    values = np.zeros(states.shape[0])
    for d in range(depth, 0, -1):
        q = layer_rewards[d - 1] + gamma * values
        if d == 1:
            return q
        values = q.reshape(-1, K).max(axis=1)
    raise AssertionError("unreachable")


def regret_of_action(
    x: State,
    a_chosen: int,
    depth: int,
    scenario: Scenario,
    dyn: DynamicsParams,
    task_cfg: TaskConfig,
    gamma: float,
) -> float:
    """Value gap of a_chosen against the best action under the depth-D oracle."""
    q = exhaustive_q(x, depth, scenario, dyn, task_cfg, gamma)
    return float(q.max() - q[a_chosen])


def robust_return(
    x0: State,
    actions,
    theta_candidates,
    dyn: DynamicsParams,
    world: SpatialIndex,
    task_cfg: TaskConfig,
    gamma: float,
) -> float:
    """Worst-case discounted return of one open-loop action sequence over a
    finite set of friction-parameter candidates.

    The n-th action's arrival state is discounted by gamma^n, matching the
    planner's reward attribution.
    """
    if not actions:
        raise ValueError("need at least one action")
    if not theta_candidates:
        raise ValueError("candidate set must be non-empty")
    worst = math.inf
    for theta in theta_candidates:
        params = replace(dyn, theta=tuple(theta))
        x = x0
        total = 0.0
        g = 1.0
        for a in actions:
            x = step(x, a, params)
            total += g * reward(x, world, task_cfg)
            g *= gamma
        if total < worst:
            worst = total
    return worst


@dataclass(frozen=True)
class Approach:
    label: str
    plan_cfg: PlanConfig


@dataclass
class EpisodeResult:
    seed: int
    outcome: Outcome | None
    steps: int
    total_discounted_reward: float
    mean_plan_time: float
    path: list[tuple[float, float, float]]
    actions: list[int]
    error: str | None = None


@dataclass
class BenchRow:
    label: str
    mean_execution_time: float
    success_fraction: float
    episodes: int


@dataclass
class BenchTable:
    rows: list[BenchRow]
    episodes: dict[str, list[EpisodeResult]]


def run_episode(
    seed: int,
    gen_cfg: GenConfig,
    dyn: DynamicsParams,
    task_cfg: TaskConfig,
    plan_cfg: PlanConfig,
) -> EpisodeResult:
    """One seeded scenario planned end to end; failures become the episode's
    record rather than an exception."""
    try:
        scenario = generate_scenario(seed, gen_cfg)
        world = SpatialIndex(scenario)
        x0 = State(p=scenario.start, v=(0.0, 0.0, 0.0))
        traj = replan_horizon(x0, world, dyn, task_cfg, plan_cfg)
    except Exception as exc:  # recorded, never aborts the suite
        return EpisodeResult(seed, None, 0, 0.0, 0.0, [], [], error=f"{type(exc).__name__}: {exc}")
    return EpisodeResult(
        seed=seed,
        outcome=traj.outcome,
        steps=len(traj.steps),
        total_discounted_reward=traj.total_discounted_reward(plan_cfg.gamma),
        mean_plan_time=traj.mean_plan_time,
        path=[x0.p] + [s.state.p for s in traj.steps],
        actions=[s.action for s in traj.steps],
    )


def _episode_job(args):
    return run_episode(*args)


def benchmark(
    seeds,
    approaches,
    gen_cfg: GenConfig = GenConfig(),
    dyn: DynamicsParams = DynamicsParams(),
    task_cfg: TaskConfig = TaskConfig(),
    workers: int = 1,
) -> BenchTable:
    """Run every approach over the seeded scenarios and aggregate the
    success-fraction / mean-execution-time table. Row order follows the
    input approach order; results are independent of worker count."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    rows = []
    episodes: dict[str, list[EpisodeResult]] = {}
    for approach in approaches:
        jobs = [(s, gen_cfg, dyn, task_cfg, approach.plan_cfg) for s in seeds]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_episode_job, jobs))
        else:
            results = [run_episode(*j) for j in jobs]
        successes = sum(1 for r in results if r.outcome is Outcome.REACHED_GOAL)
        mean_time = sum(r.mean_plan_time for r in results) / len(results)
        rows.append(
            BenchRow(
                label=approach.label,
                mean_execution_time=mean_time,
                success_fraction=successes / len(results),
                episodes=len(results),
            )
        )
        episodes[approach.label] = results
    return BenchTable(rows=rows, episodes=episodes)


def write_bench_table(table: BenchTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["approach", "mean_execution_time_s", "success_fraction", "episodes"])
        for row in table.rows:
            w.writerow([row.label, f"{row.mean_execution_time:.6f}", repr(row.success_fraction), row.episodes])


def write_episode_records(table: BenchTable, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(
            ["approach", "seed", "outcome", "steps", "total_discounted_reward", "mean_plan_time_s", "error"]
        )
        for label, results in table.episodes.items():
            for r in results:
                w.writerow(
                    [
                        label,
                        r.seed,
                        r.outcome.value if r.outcome else "error",
                        r.steps,
                        repr(r.total_discounted_reward),
                        f"{r.mean_plan_time:.6f}",
                        r.error or "",
                    ]
                )
