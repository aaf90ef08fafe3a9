"""Policy-gradient training with the clipped surrogate objective."""

from __future__ import annotations

import numpy as np
import torch
from torch import nn
from torch.distributions import Categorical

from .client import BridgeClient
from .config import AgentConfig
from .dqn import TrainResult
from .evaluate import rollout
from .networks import PolicyValueNet


def clipped_surrogate(
    ratio: torch.Tensor, advantage: torch.Tensor, eps: float
) -> torch.Tensor:
    """Per-sample objective min(r*A, clip(r, 1-eps, 1+eps)*A), to maximize."""
    clipped = torch.clamp(ratio, 1.0 - eps, 1.0 + eps)
    return torch.minimum(ratio * advantage, clipped * advantage)


def deterministic_policy(net: PolicyValueNet):
    def pick(obs: list[float]) -> int:
        with torch.no_grad():
            logits, _ = net(torch.tensor(obs, dtype=torch.float32))
        return int(torch.argmax(logits).item())

    return pick


def _gae(rewards, values, dones, last_value, gamma, lam):
    """Generalized advantage estimates over one rollout segment."""
    n = len(rewards)
    adv = np.zeros(n, dtype=np.float32)
    running = 0.0
    next_value = last_value
    for i in reversed(range(n)):
        nonterminal = 1.0 - dones[i]
        delta = rewards[i] + gamma * nonterminal * next_value - values[i]
        running = delta + gamma * lam * nonterminal * running
        adv[i] = running
        next_value = values[i]
    return adv


def train_ppo(cfg: AgentConfig, client: BridgeClient, train_seed: int = 0) -> TrainResult:
    """Run clipped-surrogate policy optimization for cfg.total_steps bridge steps."""
    torch.set_num_threads(1)  # keeps reduction order, and thus runs, reproducible
    torch.manual_seed(cfg.seed)
    rng = np.random.default_rng(cfg.seed)

    obs_len, n_actions = client.obs_len, client.action_count
    assert obs_len is not None and n_actions is not None, "handshake first"
    net = PolicyValueNet(obs_len, n_actions, cfg.hidden)
    opt = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)

    curve: list[tuple[int, float]] = []
    state = client.reset(seed=train_seed)
    obs = state["obs"]
    steps_done = 0
    while steps_done < cfg.total_steps:
        horizon = min(cfg.rollout_length, cfg.total_steps - steps_done)
        obs_buf = np.zeros((horizon, obs_len), dtype=np.float32)
        act_buf = np.zeros(horizon, dtype=np.int64)
        logp_buf = np.zeros(horizon, dtype=np.float32)
        rew_buf = np.zeros(horizon, dtype=np.float32)
        val_buf = np.zeros(horizon, dtype=np.float32)
        done_buf = np.zeros(horizon, dtype=np.float32)

        for i in range(horizon):
            obs_t = torch.tensor(obs, dtype=torch.float32)
            with torch.no_grad():
                logits, value = net(obs_t)
                dist = Categorical(logits=logits)
                action = dist.sample()
            obs_buf[i] = obs
            act_buf[i] = action.item()
            logp_buf[i] = dist.log_prob(action).item()
            val_buf[i] = value.item()
            state = client.step(int(action.item()))
            rew_buf[i] = state["reward"]
            done_buf[i] = float(state["done"])
            obs = state["obs"]
            if state["done"]:
                state = client.reset(seed=train_seed)
                obs = state["obs"]
        steps_done += horizon

        with torch.no_grad():
            _, last_value = net(torch.tensor(obs, dtype=torch.float32))
        adv = _gae(rew_buf, val_buf, done_buf, last_value.item(), cfg.gamma, cfg.gae_lambda)
        returns = adv + val_buf
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)

        t_obs = torch.from_numpy(obs_buf)
        t_act = torch.from_numpy(act_buf)
        t_logp = torch.from_numpy(logp_buf)
        t_adv = torch.from_numpy(adv)
        t_ret = torch.from_numpy(returns)
        for _ in range(cfg.ppo_epochs):
            order = rng.permutation(horizon)
            for start in range(0, horizon, cfg.minibatch_size):
                mb = order[start : start + cfg.minibatch_size]
                logits, values = net(t_obs[mb])
                dist = Categorical(logits=logits)
                ratio = torch.exp(dist.log_prob(t_act[mb]) - t_logp[mb])
                policy_obj = clipped_surrogate(ratio, t_adv[mb], cfg.clip_eps).mean()
                value_loss = nn.functional.mse_loss(values, t_ret[mb])
                loss = (
                    -policy_obj
                    + cfg.value_coef * value_loss
                    - cfg.entropy_coef * dist.entropy().mean()
                )
                opt.zero_grad()
                loss.backward()
                opt.step()

        curve.append(
            (steps_done, rollout(client, deterministic_policy(net), train_seed).undiscounted_return)
        )
        state = client.reset(seed=train_seed)
        obs = state["obs"]

    return TrainResult(config=cfg, state_dict=net.state_dict(), curve=curve)
