"""Saving and restoring trained agents."""

from __future__ import annotations

import dataclasses

import torch
from torch import nn

from .config import AgentConfig
from .dqn import TrainResult, build_q_network, greedy_policy
from .networks import PolicyValueNet
from .ppo import deterministic_policy


def save_checkpoint(result: TrainResult, path) -> None:
    torch.save(
        {
            "config": dataclasses.asdict(result.config),
            "state_dict": result.state_dict,
            "curve": result.curve,
        },
        path,
    )


def load_checkpoint(path) -> TrainResult:
    blob = torch.load(path, weights_only=False)
    raw = blob["config"]
    raw["hidden"] = tuple(raw["hidden"])
    return TrainResult(
        config=AgentConfig(**raw),
        state_dict=blob["state_dict"],
        curve=[tuple(p) for p in blob["curve"]],
    )


def policy_from_result(result: TrainResult, obs_len: int, n_actions: int):
    """Rebuild the network and return its deterministic action picker."""
    cfg = result.config
    if cfg.algorithm == "ppo":
        net: nn.Module = PolicyValueNet(obs_len, n_actions, cfg.hidden)
        net.load_state_dict(result.state_dict)
        net.eval()
        return deterministic_policy(net)
    net = build_q_network(cfg, obs_len, n_actions)
    net.load_state_dict(result.state_dict)
    net.eval()
    return greedy_policy(net)
