"""Learning baselines that train against the simulator's bridge server."""

from .checkpoint import load_checkpoint, policy_from_result, save_checkpoint
from .client import BridgeClient, BridgeError
from .config import AgentConfig
from .dqn import ReplayBuffer, TrainResult, build_q_network, greedy_policy, train_dqn
from .evaluate import (
    EpisodeRecord,
    EvalRow,
    evaluate,
    mean_return,
    random_policy,
    rollout,
    write_curve,
    write_rows,
)
from .networks import DuelingQNetwork, PolicyValueNet, QNetwork, mlp
from .ppo import clipped_surrogate, deterministic_policy, train_ppo

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "BridgeClient",
    "BridgeError",
    "DuelingQNetwork",
    "EpisodeRecord",
    "EvalRow",
    "PolicyValueNet",
    "QNetwork",
    "ReplayBuffer",
    "TrainResult",
    "build_q_network",
    "clipped_surrogate",
    "deterministic_policy",
    "evaluate",
    "greedy_policy",
    "load_checkpoint",
    "mean_return",
    "mlp",
    "policy_from_result",
    "random_policy",
    "rollout",
    "save_checkpoint",
    "train_dqn",
    "train_ppo",
    "write_curve",
    "write_rows",
]
