"""Episodic task layer: reward, termination and the normalized observation.

Reward is the goal-proximity term gated by the obstacle-distance cutoff:
zero within obs_d of any obstacle surface, otherwise
min(distance, delta_max)/delta_max / (1 + ||p - goal||), always in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .dynamics import DynamicsParams, State
from .world3d import SpatialIndex


class Outcome(Enum):
    RUNNING = "running"
    REACHED_GOAL = "reached_goal"
    COLLIDED = "collided"
    TIMED_OUT = "timed_out"


@dataclass(frozen=True)
class TaskConfig:
    obs_d: float = 1.0
    delta_max: float = 1.0
    goal_radius: float = 1.0
    max_steps: int = 200
    k_nearest: int = 5

    def __post_init__(self):
        if not 0 < self.obs_d <= self.delta_max:
            raise ValueError("need 0 < obs_d <= delta_max")
        if self.goal_radius <= 0 or self.max_steps < 1 or self.k_nearest < 0:
            raise ValueError("invalid task config")

    def obs_len(self) -> int:
        return 6 + 4 * self.k_nearest


def reward_from_distances(surface_dist: float, goal_dist: float, cfg: TaskConfig) -> float:
    """Reward given precomputed nearest-surface and goal distances.

    Split out so the planner's hot loop and the vectorized oracle can share
    the exact scalar formula with `reward`.
    """
    if surface_dist < cfg.obs_d:
        return 0.0
    delta = surface_dist if surface_dist < cfg.delta_max else cfg.delta_max
    return (delta / cfg.delta_max) / (1.0 + goal_dist)


def reward(x: State, world: SpatialIndex, cfg: TaskConfig) -> float:
    d_s = world.nearest_distance(x.p)
    goal_dist = math.dist(x.p, world.scenario.goal)
    return reward_from_distances(d_s, goal_dist, cfg)


def status(x: State, t: int, world: SpatialIndex, cfg: TaskConfig) -> Outcome:
    """Episode status at step index t; goal takes precedence over collision,
    collision over timeout."""
    if math.dist(x.p, world.scenario.goal) <= cfg.goal_radius:
        return Outcome.REACHED_GOAL
    if world.nearest_distance(x.p) <= 0.0:
        return Outcome.COLLIDED
    if t >= cfg.max_steps:
        return Outcome.TIMED_OUT
    return Outcome.RUNNING


def observe(x: State, world: SpatialIndex, dyn: DynamicsParams, cfg: TaskConfig) -> list[float]:
    """Normalized flat observation vector of length 6 + 4*k_nearest.

    Layout: goal offset / bounds diagonal (3), velocity / per-axis terminal
    speed (3), then for each of the k nearest obstacles a unit direction to
    its center (3) and its surface distance clamped to the diagonal and
    normalized (1). Missing obstacles pad with (0,0,0) and distance 1.
    """
    s = world.scenario
    diag = s.diagonal
    out = [(s.goal[i] - x.p[i]) / diag for i in range(3)]
    for i in range(3):
        # v / (beta / theta); the terminal speed is infinite at theta = 0,
        # where this degrades continuously to 0.
        vn = x.v[i] * dyn.theta[i] / dyn.beta
        out.append(min(1.0, max(-1.0, vn)))
    ranked = sorted(
        range(len(s.obstacles)),
        key=lambda i: (
            math.dist(x.p, s.obstacles[i].center) - s.obstacles[i].radius,
            i,
        ),
    )[: cfg.k_nearest]
    for i in ranked:
        ob = s.obstacles[i]
        dx = [ob.center[j] - x.p[j] for j in range(3)]
        norm = math.sqrt(sum(c * c for c in dx))
        if norm > 0:
            out.extend(c / norm for c in dx)
        else:
            out.extend((0.0, 0.0, 0.0))
        d_s = norm - ob.radius
        out.append(min(max(d_s, 0.0), diag) / diag)
    for _ in range(cfg.k_nearest - len(ranked)):
        out.extend((0.0, 0.0, 0.0, 1.0))
    return out
