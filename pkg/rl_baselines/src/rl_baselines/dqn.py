"""Q-learning with a replay buffer and a periodically synced target net."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from .client import BridgeClient
from .config import AgentConfig
from .evaluate import rollout
from .networks import DuelingQNetwork, QNetwork


class ReplayBuffer:
    """Fixed-size ring of transitions, sampled uniformly."""

    def __init__(self, capacity: int, obs_len: int):
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_len), dtype=np.float32)
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.next_obs = np.zeros((capacity, obs_len), dtype=np.float32)
        self.done = np.zeros(capacity, dtype=np.float32)
        self.size = 0
        self.pos = 0

    def add(self, obs, action, reward, next_obs, done):
        i = self.pos
        self.obs[i] = obs
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_obs[i] = next_obs
        self.done[i] = float(done)
        self.pos = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch_size)
        return (
            torch.from_numpy(self.obs[idx]),
            torch.from_numpy(self.actions[idx]),
            torch.from_numpy(self.rewards[idx]),
            torch.from_numpy(self.next_obs[idx]),
            torch.from_numpy(self.done[idx]),
        )


@dataclass
class TrainResult:
    config: AgentConfig
    state_dict: dict
    curve: list[tuple[int, float]]


def build_q_network(cfg: AgentConfig, obs_len: int, n_actions: int) -> nn.Module:
    if cfg.algorithm == "dqn_dueling":
        return DuelingQNetwork(obs_len, n_actions, cfg.hidden)
    return QNetwork(obs_len, n_actions, cfg.hidden)


def greedy_policy(net: nn.Module):
    def pick(obs: list[float]) -> int:
        with torch.no_grad():
            q = net(torch.tensor(obs, dtype=torch.float32))
        return int(torch.argmax(q).item())

    return pick


def train_dqn(cfg: AgentConfig, client: BridgeClient, train_seed: int = 0) -> TrainResult:
    """Run epsilon-greedy Q-learning for cfg.total_steps bridge steps.

    Training episodes all reset to the scenario given by train_seed; the
    curve records the greedy return on that scenario at each eval interval.
    """
    torch.set_num_threads(1)  # keeps reduction order, and thus runs, reproducible
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    explore = random.Random(cfg.seed)

    obs_len, n_actions = client.obs_len, client.action_count
    assert obs_len is not None and n_actions is not None, "handshake first"
    net = build_q_network(cfg, obs_len, n_actions)
    target = build_q_network(cfg, obs_len, n_actions)
    target.load_state_dict(net.state_dict())
    opt = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)
    buffer = ReplayBuffer(cfg.replay_size, obs_len)
    policy = greedy_policy(net)

    curve: list[tuple[int, float]] = []
    state = client.reset(seed=train_seed)
    obs = state["obs"]
    for t in range(1, cfg.total_steps + 1):
        frac = min(t / cfg.epsilon_decay_steps, 1.0)
        eps = cfg.epsilon_start + frac * (cfg.epsilon_final - cfg.epsilon_start)
        if explore.random() < eps:
            action = explore.randrange(n_actions)
        else:
            action = policy(obs)
        state = client.step(action)
        buffer.add(obs, action, state["reward"], state["obs"], state["done"])
        obs = state["obs"]
        if state["done"]:
            state = client.reset(seed=train_seed)
            obs = state["obs"]

        if buffer.size >= cfg.train_start:
            b_obs, b_act, b_rew, b_next, b_done = buffer.sample(cfg.batch_size, rng)
            with torch.no_grad():
                next_q = target(b_next).max(dim=1).values
                y = b_rew + cfg.gamma * (1.0 - b_done) * next_q
            q = net(b_obs).gather(1, b_act.unsqueeze(1)).squeeze(1)
            loss = nn.functional.smooth_l1_loss(q, y)
            opt.zero_grad()
            loss.backward()
            opt.step()
        if t % cfg.target_update == 0:
            target.load_state_dict(net.state_dict())

        if t % cfg.eval_interval == 0 or t == cfg.total_steps:
            curve.append((t, rollout(client, policy, train_seed).undiscounted_return))
            state = client.reset(seed=train_seed)
            obs = state["obs"]

    return TrainResult(config=cfg, state_dict=net.state_dict(), curve=curve)
