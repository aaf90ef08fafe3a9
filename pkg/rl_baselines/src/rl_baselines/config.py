"""Agent hyperparameters shared by the DQN and PPO trainers."""

from __future__ import annotations

from dataclasses import dataclass, field

ALGORITHMS = ("dqn", "dqn_dueling", "ppo")


@dataclass(frozen=True)
class AgentConfig:
    algorithm: str = "dqn"
    hidden: tuple[int, int] = (64, 64)
    learning_rate: float = 1e-3
    gamma: float = 0.95
    seed: int = 0
    total_steps: int = 50_000
    eval_episodes: int = 5
    eval_interval: int = 5_000

    # DQN
    replay_size: int = 50_000
    batch_size: int = 64
    train_start: int = 1_000
    target_update: int = 500
    epsilon_start: float = 1.0
    epsilon_final: float = 0.05
    epsilon_decay_steps: int = 30_000

    # PPO
    rollout_length: int = 1_024
    ppo_epochs: int = 8
    minibatch_size: int = 256
    clip_eps: float = 0.2
    gae_lambda: float = 0.95
    value_coef: float = 0.5
    entropy_coef: float = 0.01

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not 0.0 < self.clip_eps < 1.0:
            raise ValueError(f"clip_eps must be in (0, 1), got {self.clip_eps}")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        for name in (
            "total_steps",
            "eval_episodes",
            "replay_size",
            "batch_size",
            "rollout_length",
            "ppo_epochs",
            "minibatch_size",
            "target_update",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
