"""Baseline sanity gates.

The learning baselines only have to clear qualitative bars: DQN must beat a
measured random-policy return by 2x on the fixed evaluation scenario, the
clipped objective must match hand computation exactly, trained agents must
out-return a random policy, and their success fractions must land below the
planner's. Every numeric target here is either measured in this run or a
hand-computed constant; nothing is copied from an external table.
"""

import csv
import subprocess
import sys

import pytest
import torch

from rl_baselines import (
    AgentConfig,
    QNetwork,
    clipped_surrogate,
    evaluate,
    greedy_policy,
    mean_return,
    policy_from_result,
    random_policy,
    rollout,
    train_dqn,
    train_ppo,
)

EVAL_SCENARIO_SEED = 0
BASELINE_EPISODES = 20
GENERALIZATION_SEEDS = list(range(20))


@pytest.fixture(scope="module")
def random_baseline(client):
    """Mean return of uniformly random actions on the fixed eval scenario."""
    returns = [
        rollout(client, random_policy(client.action_count, i), EVAL_SCENARIO_SEED).undiscounted_return
        for i in range(BASELINE_EPISODES)
    ]
    return sum(returns) / len(returns)


@pytest.fixture(scope="module")
def dqn_result(client):
    cfg = AgentConfig(algorithm="dqn", total_steps=50_000, seed=0)
    return train_dqn(cfg, client, train_seed=EVAL_SCENARIO_SEED)


@pytest.fixture(scope="module")
def ppo_result(client):
    cfg = AgentConfig(algorithm="ppo", total_steps=30_000, seed=0)
    return train_ppo(cfg, client, train_seed=EVAL_SCENARIO_SEED)


def planner_success_fraction(tmp_path, episodes):
    out_dir = tmp_path / "planner_bench"
    proc = subprocess.run(
        [
            sys.executable, "-m", "optiplan.cli", "bench",
            "--episodes", str(episodes), "--workers", "4", "--out", str(out_dir),
        ],
        capture_output=True,
        text=True,
        timeout=600,
    )
    assert proc.returncode == 0, proc.stderr
    with open(out_dir / "bench_table.csv") as fh:
        row = next(csv.DictReader(fh))
    return float(row["success_fraction"])


class TestBaselineSanity:
    def test_random_baseline_measured(self, random_baseline):
        assert 0.0 < random_baseline < 200.0
        print(f"ACCEPTANCE PASS: random-policy mean return measured at {random_baseline:.3f}")

    def test_dqn_doubles_random_return(self, client, dqn_result, random_baseline):
        policy = policy_from_result(dqn_result, client.obs_len, client.action_count)
        returns = [
            rollout(client, policy, EVAL_SCENARIO_SEED).undiscounted_return
            for _ in range(dqn_result.config.eval_episodes)
        ]
        mean_eval = sum(returns) / len(returns)
        assert mean_eval >= 2.0 * random_baseline
        print(
            f"ACCEPTANCE PASS: DQN 50k-step eval return {mean_eval:.3f} "
            f">= 2x random {random_baseline:.3f}"
        )

    def test_clipped_objective_hand_values(self):
        eps = 0.2
        cases = [
            (1.0, 2.0, 2.0),
            (1.4, 2.0, 2.4),
            (0.6, 2.0, 1.2),
            (1.0, -2.0, -2.0),
            (1.4, -2.0, -2.8),
            (0.6, -2.0, -1.6),
        ]
        for ratio, adv, expected in cases:
            got = clipped_surrogate(
                torch.tensor([ratio], dtype=torch.float64),
                torch.tensor([adv], dtype=torch.float64),
                eps,
            ).item()
            assert got == expected
        print("ACCEPTANCE PASS: clipped surrogate matches hand computation at r in {0.6, 1.0, 1.4}")

    def test_ppo_beats_random(self, client, ppo_result, random_baseline):
        policy = policy_from_result(ppo_result, client.obs_len, client.action_count)
        returns = [
            rollout(client, policy, EVAL_SCENARIO_SEED).undiscounted_return
            for _ in range(ppo_result.config.eval_episodes)
        ]
        mean_eval = sum(returns) / len(returns)
        assert mean_eval > random_baseline
        print(
            f"ACCEPTANCE PASS: PPO eval return {mean_eval:.3f} > random {random_baseline:.3f}"
        )

    def test_eval_repeatable(self, client, dqn_result):
        policy = policy_from_result(dqn_result, client.obs_len, client.action_count)
        seeds = GENERALIZATION_SEEDS[:10]
        row_a, recs_a = evaluate(client, policy, seeds, "dqn")
        row_b, recs_b = evaluate(client, policy, seeds, "dqn")
        assert row_a.success_fraction == row_b.success_fraction
        assert [r.undiscounted_return for r in recs_a] == [r.undiscounted_return for r in recs_b]
        print("ACCEPTANCE PASS: repeated checkpoint evaluation is bit-identical")

    def test_success_fractions_below_planner(self, client, dqn_result, ppo_result, tmp_path):
        planner_sf = planner_success_fraction(tmp_path, len(GENERALIZATION_SEEDS))

        torch.manual_seed(0)
        untrained = greedy_policy(QNetwork(client.obs_len, client.action_count))
        rows = {}
        for label, policy in [
            ("random_weights", untrained),
            ("dqn", policy_from_result(dqn_result, client.obs_len, client.action_count)),
            ("ppo", policy_from_result(ppo_result, client.obs_len, client.action_count)),
        ]:
            row, _ = evaluate(client, policy, GENERALIZATION_SEEDS, label)
            rows[label] = row

        # recorded, expected low: an untrained net has no reason to find goals
        print(f"recorded: random-weights success fraction {rows['random_weights'].success_fraction:.3f}")
        assert rows["dqn"].success_fraction < planner_sf
        assert rows["ppo"].success_fraction < planner_sf
        print(
            "ACCEPTANCE PASS: success fractions "
            f"dqn {rows['dqn'].success_fraction:.3f}, ppo {rows['ppo'].success_fraction:.3f} "
            f"< planner {planner_sf:.3f} "
            "(published 0.235-0.453 band is plausibility context only)"
        )
