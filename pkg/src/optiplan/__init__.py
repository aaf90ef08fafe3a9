"""Deterministic optimistic look-ahead planning for 3D obstacle avoidance."""

from .dynamics import ACTIONS, K, DynamicsParams, State, state_matrix, step
from .planner import PlanConfig, PlanResult, Trajectory, plan, replan_horizon
from .task import Outcome, TaskConfig, observe, reward, status
from .world3d import (
    GenConfig,
    GenerationInfeasible,
    InvariantViolation,
    Obstacle,
    ParseError,
    Scenario,
    SpatialIndex,
    generate_scenario,
    load_scenario,
    nearest_surface_distance,
    save_scenario,
)

__all__ = [
    "ACTIONS",
    "K",
    "DynamicsParams",
    "State",
    "state_matrix",
    "step",
    "PlanConfig",
    "PlanResult",
    "Trajectory",
    "plan",
    "replan_horizon",
    "Outcome",
    "TaskConfig",
    "observe",
    "reward",
    "status",
    "GenConfig",
    "GenerationInfeasible",
    "InvariantViolation",
    "Obstacle",
    "ParseError",
    "Scenario",
    "SpatialIndex",
    "generate_scenario",
    "load_scenario",
    "nearest_surface_distance",
    "save_scenario",
]

__version__ = "0.1.0"
