"""Look-ahead tree planning over the deterministic point-mass system.

Two expansion strategies share one tree structure:

* uniform -- breadth-first: always expand the shallowest frontier leaf,
  FIFO among equals.
* optimistic -- expand the frontier leaf with the largest upper bound
  b = u + gamma^depth / (1 - gamma), ties broken by shallower depth then
  insertion order.

u is the discounted reward sum accumulated from the root; with rewards in
[0, 1] the b term bounds everything the subtree below could still earn, which
is what makes the optimistic choice sound.
"""

from __future__ import annotations

import heapq
import math
import time
from collections import deque
from dataclasses import dataclass, field, replace

from .dynamics import ACTIONS, K, DynamicsParams, State, axis_coeffs
from .task import Outcome, TaskConfig, reward_from_distances, status
from .world3d import SpatialIndex, _BRUTE_FORCE_MAX


class AllChildrenTerminal(RuntimeError):
    """Every root child is collision-pruned; nothing can be planned."""


@dataclass(frozen=True)
class PlanConfig:
    gamma: float = 0.9
    budget: int = 1000
    mode: str = "optimistic"
    prune_collisions: bool = True

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.mode not in ("uniform", "optimistic"):
            raise ValueError(f"unknown mode {self.mode!r}")


class TreeNode:
    __slots__ = (
        "state",
        "depth",
        "incoming_action",
        "incoming_reward",
        "u",
        "b",
        "children",
        "terminal",
        "root_action",
    )

    def __init__(self, state, depth, incoming_action, incoming_reward, u, b, terminal, root_action):
        self.state = state
        self.depth = depth
        self.incoming_action = incoming_action
        self.incoming_reward = incoming_reward
        self.u = u
        self.b = b
        self.children = None
        self.terminal = terminal
        self.root_action = root_action


@dataclass
class PlanResult:
    action: int
    root_values: list[float]
    expansions: int
    deepest_depth: int
    elapsed: float
    blocked: bool = False
    root: TreeNode | None = field(default=None, repr=False, compare=False)


def plan(
    x0: State,
    world: SpatialIndex,
    dyn: DynamicsParams,
    task_cfg: TaskConfig,
    cfg: PlanConfig,
    keep_tree: bool = False,
) -> PlanResult:
    """Build a look-ahead tree from x0 under the expansion budget and return
    the best root action with search statistics. Deterministic apart from
    the elapsed time."""
    t_start = time.perf_counter()
    gamma = cfg.gamma
    budget = cfg.budget
    prune = cfg.prune_collisions
    obs_d = task_cfg.obs_d
    scenario = world.scenario
    gx, gy, gz = scenario.goal
    sqrt = math.sqrt

    # Flat obstacle list for the small-world fast path; identical arithmetic
    # to SpatialIndex.nearest.
    obstacles = [(ob.center[0], ob.center[1], ob.center[2], ob.radius) for ob in scenario.obstacles]
    use_flat = len(obstacles) <= _BRUTE_FORCE_MAX
    nearest_distance = world.nearest_distance

    coeffs = axis_coeffs(dyn)
    (ex, bx, cx), (ey, by, cy), (ez, bz, cz) = coeffs
    acts = []
    for ax, ay, az in ACTIONS:
        ux, uy, uz = dyn.beta * ax, dyn.beta * ay, dyn.beta * az
        acts.append((ux * bx, uy * by, uz * bz, ux * cx, uy * cy, uz * cz))

    # gamma^d and the tail bound gamma^d / (1 - gamma), extended as the tree
    # deepens.
    inv_tail = 1.0 / (1.0 - gamma) if gamma > 0.0 else 1.0
    gpow = [1.0]
    tail = [inv_tail if gamma > 0.0 else 0.0]

    def extend_pows(depth):
        while len(gpow) <= depth:
            gpow.append(gpow[-1] * gamma)
            tail.append(gpow[-1] * inv_tail if gamma > 0.0 else 0.0)

    extend_pows(1)
    root = TreeNode(x0, 0, None, 0.0, 0.0, tail[0], False, -1)

    best_u = [-math.inf] * K
    uniform = cfg.mode == "uniform"
    if uniform:
        queue = deque([root])
    else:
        heap = [(-root.b, 0, 0, root)]
    seq = 1
    expansions = 0
    deepest = 0

    while expansions < budget:
        if uniform:
            if not queue:
                break
            node = queue.popleft()
        else:
            if not heap:
                break
            node = heapq.heappop(heap)[3]
        expansions += 1
        depth = node.depth
        if depth > deepest:
            deepest = depth
        child_depth = depth + 1
        extend_pows(child_depth)
        g = gpow[depth]
        child_tail = tail[child_depth]
        u0 = node.u
        (px, py, pz), (vx, vy, vz) = node.state
        npx = px + vx * bx
        npy = py + vy * by
        npz = pz + vz * bz
        nvx = vx * ex
        nvy = vy * ey
        nvz = vz * ez
        branch = node.root_action
        children = []
        for a in range(K):
            dvx, dvy, dvz, dpx, dpy, dpz = acts[a]
            cpx = npx + dpx
            cpy = npy + dpy
            cpz = npz + dpz
            cp = (cpx, cpy, cpz)
            if use_flat:
                d_s = math.inf
                for ox, oy, oz, orad in obstacles:
                    ddx = cpx - ox
                    ddy = cpy - oy
                    ddz = cpz - oz
                    d = sqrt(ddx * ddx + ddy * ddy + ddz * ddz) - orad
                    if d < d_s:
                        d_s = d
            else:
                d_s = nearest_distance(cp)
            ddx = cpx - gx
            ddy = cpy - gy
            ddz = cpz - gz
            goal_dist = sqrt(ddx * ddx + ddy * ddy + ddz * ddz)
            r = reward_from_distances(d_s, goal_dist, task_cfg)
            u = u0 + g * r
            terminal = prune and d_s < obs_d
            child = TreeNode(
                State(cp, (nvx + dvx, nvy + dvy, nvz + dvz)),
                child_depth,
                a,
                r,
                u,
                u if terminal else u + child_tail,
                terminal,
                a if branch == -1 else branch,
            )
            children.append(child)
            cb = child.root_action
            if u > best_u[cb]:
                best_u[cb] = u
            if not terminal:
                if uniform:
                    queue.append(child)
                else:
                    heapq.heappush(heap, (-child.b, child_depth, seq, child))
                seq += 1
        node.children = children

    elapsed = time.perf_counter() - t_start
    blocked = root.children is not None and all(c.terminal for c in root.children)
    if blocked:
        # Fully blocked root: every child was collision-pruned. Fall back to
        # the null action and flag it.
        action = 0
    else:
        action = max(range(K), key=lambda a: (best_u[a], -a))
    return PlanResult(
        action=action,
        root_values=best_u,
        expansions=expansions,
        deepest_depth=deepest,
        elapsed=elapsed,
        blocked=blocked,
        root=root if keep_tree else None,
    )


@dataclass(frozen=True)
class TrajectoryStep:
    action: int
    state: State
    reward: float


@dataclass
class Trajectory:
    initial_state: State
    steps: list[TrajectoryStep]
    outcome: Outcome
    plan_times: list[float]

    @property
    def mean_plan_time(self) -> float:
        return sum(self.plan_times) / len(self.plan_times) if self.plan_times else 0.0

    def total_discounted_reward(self, gamma: float) -> float:
        return sum(s.reward * gamma**i for i, s in enumerate(self.steps))


def replan_horizon(
    x0: State,
    world: SpatialIndex,
    dyn: DynamicsParams,
    task_cfg: TaskConfig,
    cfg: PlanConfig,
    max_steps: int | None = None,
) -> Trajectory:
    """Receding-horizon execution: plan, apply the first action, repeat until
    the episode terminates."""
    from .dynamics import step as dyn_step
    from .task import reward as task_reward

    if max_steps is not None:
        task_cfg = replace(task_cfg, max_steps=max_steps)
    x = x0
    t = 0
    steps: list[TrajectoryStep] = []
    plan_times: list[float] = []
    while True:
        outcome = status(x, t, world, task_cfg)
        if outcome is not Outcome.RUNNING:
            break
        result = plan(x, world, dyn, task_cfg, cfg)
        x = dyn_step(x, result.action, dyn)
        steps.append(TrajectoryStep(result.action, x, task_reward(x, world, task_cfg)))
        plan_times.append(result.elapsed)
        t += 1
    return Trajectory(initial_state=x0, steps=steps, outcome=outcome, plan_times=plan_times)


def iter_nodes(root: TreeNode):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        if node.children:
            stack.extend(node.children)


def dump_tree(root: TreeNode, path) -> None:
    """Write the tree as a flat table (one node per line) for debugging:
    depth, incoming action, terminal flag, u, b. Format in docs/FORMATS.md."""
    with open(path, "w") as fh:
        fh.write("depth\taction\tterminal\tu\tb\n")
        for node in iter_nodes(root):
            a = "-" if node.incoming_action is None else str(node.incoming_action)
            fh.write(f"{node.depth}\t{a}\t{int(node.terminal)}\t{node.u!r}\t{node.b!r}\n")
