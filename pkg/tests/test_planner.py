import math

import numpy as np
import pytest

from optiplan import (
    DynamicsParams,
    K,
    Obstacle,
    Outcome,
    PlanConfig,
    Scenario,
    SpatialIndex,
    State,
    TaskConfig,
    plan,
    replan_horizon,
    step,
)
from optiplan.evaluation import exhaustive_q
from optiplan.planner import dump_tree, iter_nodes
from optiplan.task import reward
from scenario_helpers import make_empty_scenario, make_enclosed_goal_scenario, rest_state

DYN = DynamicsParams()
TASK = TaskConfig()


def full_layer_budget(depth: int) -> int:
    return (K**depth - 1) // (K - 1)


class TestPlan:
    def test_empty_world_goes_toward_goal(self, empty_world):
        res = plan(rest_state(), empty_world, DYN, TASK, PlanConfig(budget=500, gamma=0.9))
        assert res.action == 1  # goal at (5, 0, 0)

    def test_budget_one_is_greedy(self, small_world):
        res = plan(rest_state(), small_world, DYN, TASK, PlanConfig(budget=1))
        assert res.expansions == 1
        rewards = [
            reward(step(rest_state(), a, DYN), small_world, TASK) for a in range(K)
        ]
        assert res.action == max(range(K), key=lambda a: (rewards[a], -a))
        assert res.root_values == pytest.approx(rewards)

    def test_uniform_full_layer_matches_oracle(self, small_scenario, small_world):
        depth = 4
        cfg = PlanConfig(mode="uniform", budget=full_layer_budget(depth), prune_collisions=False)
        res = plan(rest_state(), small_world, DYN, TASK, cfg)
        q = exhaustive_q(rest_state(), depth, small_scenario, DYN, TASK, cfg.gamma)
        assert float(q.max() - q[res.action]) == 0.0
        assert res.root_values == pytest.approx(list(q))

    def test_wall_blocks_naive_action(self):
        # Wall of spheres across +x between the start and the goal; heading
        # straight at it is suboptimal.
        wall = [
            Obstacle(center=(2.5, y, z), radius=1.1)
            for y in (-2.0, 0.0, 2.0)
            for z in (-2.0, 0.0, 2.0)
        ]
        scenario = Scenario(
            bounds_min=(-10.0, -10.0, -10.0),
            bounds_max=(10.0, 10.0, 10.0),
            start=(0.0, 0.0, 0.0),
            goal=(6.0, 0.0, 0.0),
            seed=0,
            obstacles=tuple(wall),
        )
        world = SpatialIndex(scenario)
        x0 = State(p=(0.0, 0.0, 0.0), v=(3.0, 0.0, 0.0))  # rushing at the wall
        cfg = PlanConfig(mode="optimistic", budget=3000, prune_collisions=False)
        res = plan(x0, world, DYN, TASK, cfg)
        assert res.action != 1
        q = exhaustive_q(x0, 6, scenario, DYN, TASK, cfg.gamma)
        # symmetric wall: accept any oracle-optimal action (exact ties)
        assert float(q.max() - q[res.action]) <= 1e-12

    def test_bound_sandwich_along_paths(self, small_world):
        res = plan(
            rest_state(), small_world, DYN, TASK, PlanConfig(budget=300), keep_tree=True
        )
        gamma = 0.9
        count = 0
        for node in iter_nodes(res.root):
            assert node.u <= node.b + 1e-15
            if node.children:
                for child in node.children:
                    count += 1
                    assert child.u >= node.u - 1e-15
                    assert child.b <= node.b + 1e-12
                    expected_u = node.u + gamma**node.depth * child.incoming_reward
                    assert child.u == pytest.approx(expected_u, abs=1e-12)
                    if not child.terminal:
                        assert child.b == pytest.approx(
                            child.u + gamma**child.depth / (1 - gamma), abs=1e-9
                        )
        assert count == 300 * K

    def test_expanded_nodes_have_k_children(self, small_world):
        res = plan(rest_state(), small_world, DYN, TASK, PlanConfig(budget=50), keep_tree=True)
        for node in iter_nodes(res.root):
            assert node.children is None or len(node.children) == K

    def test_uniform_layers_complete_in_order(self, empty_world):
        for depth in (1, 2, 3):
            cfg = PlanConfig(mode="uniform", budget=full_layer_budget(depth), prune_collisions=False)
            res = plan(rest_state(), empty_world, DYN, TASK, cfg, keep_tree=True)
            depths = [n.depth for n in iter_nodes(res.root) if n.children is not None]
            assert max(depths) == depth - 1
            # every node above the frontier layer is expanded
            assert sum(1 for d in depths if d < depth) == full_layer_budget(depth)

    def test_determinism(self, small_world):
        cfg = PlanConfig(budget=800)
        a = plan(rest_state(), small_world, DYN, TASK, cfg)
        b = plan(rest_state(), small_world, DYN, TASK, cfg)
        assert a.action == b.action
        assert a.root_values == b.root_values
        assert a.expansions == b.expansions
        assert a.deepest_depth == b.deepest_depth

    def test_blocked_root_returns_null_action(self):
        # Start completely inside the reward-cutoff shell of a big sphere.
        scenario = Scenario(
            bounds_min=(-10.0, -10.0, -10.0),
            bounds_max=(10.0, 10.0, 10.0),
            start=(0.0, 0.0, 0.0),
            goal=(8.0, 0.0, 0.0),
            seed=0,
            obstacles=(Obstacle(center=(0.0, 0.0, 0.0), radius=3.0),),
        )
        world = SpatialIndex(scenario)
        res = plan(rest_state(), world, DYN, TASK, PlanConfig(budget=10))
        assert res.blocked
        assert res.action == 0

    def test_pruned_children_never_expanded(self):
        scenario = make_enclosed_goal_scenario()
        world = SpatialIndex(scenario)
        res = plan(rest_state(), world, DYN, TASK, PlanConfig(budget=500), keep_tree=True)
        for node in iter_nodes(res.root):
            if node.terminal:
                assert node.children is None

    def test_config_validation(self):
        with pytest.raises(ValueError):
            PlanConfig(gamma=1.0)
        with pytest.raises(ValueError):
            PlanConfig(budget=0)
        with pytest.raises(ValueError):
            PlanConfig(mode="dfs")


class TestReplanHorizon:
    def test_reaches_goal_in_empty_world(self, empty_world):
        traj = replan_horizon(rest_state(), empty_world, DYN, TASK, PlanConfig(budget=300))
        assert traj.outcome is Outcome.REACHED_GOAL
        assert 0 < len(traj.steps) <= TASK.max_steps
        final = traj.steps[-1].state
        assert math.dist(final.p, empty_world.scenario.goal) <= TASK.goal_radius

    def test_already_at_goal(self):
        world = SpatialIndex(make_empty_scenario(goal=(5.0, 0.0, 0.0)))
        traj = replan_horizon(rest_state((5.0, 0.0, 0.0)), world, DYN, TASK, PlanConfig(budget=10))
        assert traj.outcome is Outcome.REACHED_GOAL
        assert traj.steps == []

    def test_enclosed_goal_times_out_without_collision(self):
        world = SpatialIndex(make_enclosed_goal_scenario())
        traj = replan_horizon(
            rest_state(), world, DYN, TASK, PlanConfig(budget=200), max_steps=30
        )
        assert traj.outcome is Outcome.TIMED_OUT
        assert len(traj.steps) == 30

    def test_deterministic_trajectory(self, small_world):
        cfg = PlanConfig(budget=200)
        a = replan_horizon(rest_state(), small_world, DYN, TASK, cfg)
        b = replan_horizon(rest_state(), small_world, DYN, TASK, cfg)
        assert [s.action for s in a.steps] == [s.action for s in b.steps]
        assert [s.state for s in a.steps] == [s.state for s in b.steps]
        assert a.outcome is b.outcome


def test_dump_tree(tmp_path, small_world):
    res = plan(rest_state(), small_world, DYN, TASK, PlanConfig(budget=20), keep_tree=True)
    path = tmp_path / "tree.tsv"
    dump_tree(res.root, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "depth\taction\tterminal\tu\tb"
    assert len(lines) == 1 + 1 + 20 * K  # header + root + children
