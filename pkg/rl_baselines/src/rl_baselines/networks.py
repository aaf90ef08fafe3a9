"""Small fully connected policy and value networks."""

from __future__ import annotations

import torch
from torch import nn


def mlp(sizes: list[int]) -> nn.Sequential:
    """ReLU net over the given layer widths; no activation after the last."""
    layers: list[nn.Module] = []
    for i in range(len(sizes) - 1):
        layers.append(nn.Linear(sizes[i], sizes[i + 1]))
        if i < len(sizes) - 2:
            layers.append(nn.ReLU())
    return nn.Sequential(*layers)


class QNetwork(nn.Module):
    """Plain multilayer perceptron mapping observation to one Q per action."""

    def __init__(self, obs_len: int, n_actions: int, hidden=(64, 64)):
        super().__init__()
        self.net = mlp([obs_len, *hidden, n_actions])

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        return self.net(obs)


class DuelingQNetwork(nn.Module):
    """Separate state-value and advantage heads over a shared trunk.

    The heads recombine as Q(s,a) = V(s) + A(s,a) - mean_a A(s,a), so the
    advantage term contributes zero mean across actions and the value head
    carries the state's overall level.
    """

    def __init__(self, obs_len: int, n_actions: int, hidden=(64, 64)):
        super().__init__()
        self.trunk = mlp([obs_len, *hidden])
        self.trunk.append(nn.ReLU())
        self.value_head = nn.Linear(hidden[-1], 1)
        self.adv_head = nn.Linear(hidden[-1], n_actions)

    def forward(self, obs: torch.Tensor) -> torch.Tensor:
        z = self.trunk(obs)
        v = self.value_head(z)
        a = self.adv_head(z)
        return v + a - a.mean(dim=-1, keepdim=True)


class PolicyValueNet(nn.Module):
    """Categorical policy logits and a state-value estimate."""

    def __init__(self, obs_len: int, n_actions: int, hidden=(64, 64)):
        super().__init__()
        self.policy = mlp([obs_len, *hidden, n_actions])
        self.value = mlp([obs_len, *hidden, 1])

    def forward(self, obs: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        return self.policy(obs), self.value(obs).squeeze(-1)
