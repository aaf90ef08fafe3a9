"""3D world model: sphere obstacles, seeded scenario generation, distance queries.

Obstacles are analytic spheres and the free-distance query is served by a
uniform grid index whose answers are required to match a brute-force scan
exactly (the grid only accelerates, never approximates).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .rng import SplitMix64

Vec3 = tuple[float, float, float]

# Below this many obstacles a flat scan beats the grid walk; both paths use
# the identical per-obstacle arithmetic so results are bit-equal.
_BRUTE_FORCE_MAX = 16


class InvariantViolation(ValueError):
    """A scenario (constructed or loaded) breaks a structural invariant."""


class ParseError(ValueError):
    """A scenario file could not be parsed."""


class GenerationInfeasible(RuntimeError):
    """Random placement failed repeatedly; the generation config is overcrowded."""


@dataclass(frozen=True)
class Obstacle:
    center: Vec3
    radius: float


@dataclass(frozen=True)
class Scenario:
    bounds_min: Vec3
    bounds_max: Vec3
    start: Vec3
    goal: Vec3
    seed: int
    obstacles: tuple[Obstacle, ...]

    @property
    def diagonal(self) -> float:
        return math.dist(self.bounds_min, self.bounds_max)


@dataclass(frozen=True)
class GenConfig:
    bounds_min: Vec3 = (-10.0, -10.0, -10.0)
    bounds_max: Vec3 = (10.0, 10.0, 10.0)
    start: Vec3 = (0.0, 0.0, 0.0)
    n_obstacles: int = 10
    radius_min: float = 0.5
    radius_max: float = 1.5
    clearance_margin: float = 2.0
    min_goal_distance: float = 10.0
    max_retries: int = 1000


def validate_scenario(s: Scenario) -> None:
    """Check the structural invariants; raise InvariantViolation on failure."""
    for i in range(3):
        if not s.bounds_min[i] < s.bounds_max[i]:
            raise InvariantViolation(
                f"bounds_min must be < bounds_max componentwise, got axis {i}: "
                f"{s.bounds_min[i]} vs {s.bounds_max[i]}"
            )
    for name, p in (("start", s.start), ("goal", s.goal)):
        if not _inside(p, s.bounds_min, s.bounds_max):
            raise InvariantViolation(f"{name} {p} lies outside the world bounds")
        if not all(math.isfinite(c) for c in p):
            raise InvariantViolation(f"{name} has non-finite components")
    for k, ob in enumerate(s.obstacles):
        if not ob.radius > 0:
            raise InvariantViolation(f"obstacle {k}: radius must be > 0, got {ob.radius}")
        if not _inside(ob.center, s.bounds_min, s.bounds_max):
            raise InvariantViolation(f"obstacle {k}: center {ob.center} outside bounds")


def _inside(p: Vec3, lo: Vec3, hi: Vec3) -> bool:
    return all(lo[i] <= p[i] <= hi[i] for i in range(3))


def _surface_distance(p, center, radius: float) -> float:
    dx = p[0] - center[0]
    dy = p[1] - center[1]
    dz = p[2] - center[2]
    return math.sqrt(dx * dx + dy * dy + dz * dz) - radius


def brute_force_nearest(obstacles, p) -> tuple[float, int]:
    """Reference scan over all obstacles: (surface distance, argmin index).

    Returns (inf, -1) when there are no obstacles. Ties keep the lowest index.
    """
    best = math.inf
    best_i = -1
    for i, ob in enumerate(obstacles):
        d = _surface_distance(p, ob.center, ob.radius)
        if d < best:
            best = d
            best_i = i
    return best, best_i


class SpatialIndex:
    """Uniform grid over the obstacle set for nearest-surface-distance queries.

    Immutable after construction; safe to share across workers. Query results
    are identical to `brute_force_nearest` (same arithmetic, expanding-ring
    search with an exact stopping bound).
    """

    def __init__(self, scenario: Scenario, cell_size: float | None = None):
        self.scenario = scenario
        obstacles = scenario.obstacles
        self._obstacles = obstacles
        max_r = max((ob.radius for ob in obstacles), default=1.0)
        if cell_size is None:
            cell_size = 2.0 * max_r
        self.cell_size = cell_size
        # Grid covers the bounds inflated by the largest radius so every cell
        # a sphere overlaps exists (centers are inside the bounds).
        self._origin = tuple(scenario.bounds_min[i] - max_r for i in range(3))
        extent = tuple(scenario.bounds_max[i] + max_r - self._origin[i] for i in range(3))
        self._dims = tuple(max(1, math.ceil(extent[i] / cell_size)) for i in range(3))
        cells: dict[tuple[int, int, int], list[int]] = {}
        for idx, ob in enumerate(obstacles):
            lo = tuple(
                self._cell_coord(ob.center[i] - ob.radius, i) for i in range(3)
            )
            hi = tuple(
                self._cell_coord(ob.center[i] + ob.radius, i) for i in range(3)
            )
            for cx in range(lo[0], hi[0] + 1):
                for cy in range(lo[1], hi[1] + 1):
                    for cz in range(lo[2], hi[2] + 1):
                        cells.setdefault((cx, cy, cz), []).append(idx)
        self._cells = cells

    def _cell_coord(self, x: float, axis: int) -> int:
        c = int(math.floor((x - self._origin[axis]) / self.cell_size))
        return min(max(c, 0), self._dims[axis] - 1)

    def nearest(self, p) -> tuple[float, int]:
        """(surface distance, obstacle index) of the closest obstacle to p.

        Negative distance inside an obstacle; (inf, -1) for an empty world.
        """
        obstacles = self._obstacles
        if len(obstacles) <= _BRUTE_FORCE_MAX:
            return brute_force_nearest(obstacles, p)
        cx = self._cell_coord(p[0], 0)
        cy = self._cell_coord(p[1], 1)
        cz = self._cell_coord(p[2], 2)
        dims = self._dims
        cells = self._cells
        max_ring = max(
            cx, dims[0] - 1 - cx, cy, dims[1] - 1 - cy, cz, dims[2] - 1 - cz
        )
        best = math.inf
        best_i = -1
        seen: set[int] = set()
        for ring in range(max_ring + 1):
            # Any obstacle not yet seen sits (via the cell holding its closest
            # surface point) at Chebyshev ring >= `ring`, hence at Euclidean
            # distance >= (ring - 1) * cell_size from p.
            if best <= (ring - 1) * self.cell_size:
                break
            for cell in _ring_cells(cx, cy, cz, ring, dims):
                for idx in cells.get(cell, ()):
                    if idx in seen:
                        continue
                    seen.add(idx)
                    ob = obstacles[idx]
                    d = _surface_distance(p, ob.center, ob.radius)
                    if d < best or (d == best and idx < best_i):
                        best = d
                        best_i = idx
        if best_i == -1:
            return math.inf, -1
        # Re-run the tie rule of the brute-force scan: lowest index wins, and
        # ring order may have visited a higher index first on exact ties.
        return best, best_i

    def nearest_distance(self, p) -> float:
        return self.nearest(p)[0]


def _ring_cells(cx, cy, cz, ring, dims):
    if ring == 0:
        if 0 <= cx < dims[0] and 0 <= cy < dims[1] and 0 <= cz < dims[2]:
            yield (cx, cy, cz)
        return
    x_lo, x_hi = cx - ring, cx + ring
    y_lo, y_hi = cy - ring, cy + ring
    z_lo, z_hi = cz - ring, cz + ring
    for x in range(max(x_lo, 0), min(x_hi, dims[0] - 1) + 1):
        for y in range(max(y_lo, 0), min(y_hi, dims[1] - 1) + 1):
            on_xy_face = x in (x_lo, x_hi) or y in (y_lo, y_hi)
            if on_xy_face:
                for z in range(max(z_lo, 0), min(z_hi, dims[2] - 1) + 1):
                    yield (x, y, z)
            else:
                for z in (z_lo, z_hi):
                    if 0 <= z < dims[2]:
                        yield (x, y, z)


def nearest_surface_distance(index: SpatialIndex, p) -> float:
    """Signed distance from p to the closest obstacle surface."""
    return index.nearest_distance(p)


def generate_scenario(seed: int, cfg: GenConfig = GenConfig()) -> Scenario:
    """Deterministically generate a random scenario from (seed, cfg).

    Sampling procedure (frozen in docs/FORMATS.md): one SplitMix64 stream
    seeded with `seed`; draw the goal (3 uniforms per attempt) until it is at
    least min_goal_distance from the start, then each obstacle (3 uniforms for
    the center, 1 for the radius) until it clears start and goal by
    clearance_margin. Raises GenerationInfeasible after max_retries rejected
    draws in any one stage.
    """
    if cfg.n_obstacles < 0 or cfg.radius_min <= 0 or cfg.radius_max < cfg.radius_min:
        raise ValueError("invalid generation config")
    rng = SplitMix64(seed)
    lo, hi = cfg.bounds_min, cfg.bounds_max

    def sample_point() -> Vec3:
        return tuple(rng.uniform(lo[i], hi[i]) for i in range(3))

    goal = None
    for _ in range(cfg.max_retries):
        cand = sample_point()
        if math.dist(cand, cfg.start) >= cfg.min_goal_distance:
            goal = cand
            break
    if goal is None:
        raise GenerationInfeasible(
            f"could not place a goal min_goal_distance={cfg.min_goal_distance} m "
            f"from the start within {cfg.max_retries} draws"
        )

    obstacles: list[Obstacle] = []
    for _ in range(cfg.n_obstacles):
        placed = False
        for _ in range(cfg.max_retries):
            center = sample_point()
            radius = rng.uniform(cfg.radius_min, cfg.radius_max)
            if (
                _surface_distance(cfg.start, center, radius) >= cfg.clearance_margin
                and _surface_distance(goal, center, radius) >= cfg.clearance_margin
            ):
                obstacles.append(Obstacle(center=center, radius=radius))
                placed = True
                break
        if not placed:
            raise GenerationInfeasible(
                f"could not place obstacle {len(obstacles)} with clearance_margin="
                f"{cfg.clearance_margin} m within {cfg.max_retries} draws"
            )

    scenario = Scenario(
        bounds_min=tuple(lo),
        bounds_max=tuple(hi),
        start=tuple(cfg.start),
        goal=goal,
        seed=seed,
        obstacles=tuple(obstacles),
    )
    validate_scenario(scenario)
    return scenario


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "bounds_min": list(s.bounds_min),
        "bounds_max": list(s.bounds_max),
        "start": list(s.start),
        "goal": list(s.goal),
        "seed": s.seed,
        "obstacles": [{"center": list(ob.center), "radius": ob.radius} for ob in s.obstacles],
    }


def scenario_from_dict(doc: dict, source: str = "<dict>") -> Scenario:
    try:
        obstacles = tuple(
            Obstacle(center=_vec3(ob["center"]), radius=float(ob["radius"]))
            for ob in doc["obstacles"]
        )
        scenario = Scenario(
            bounds_min=_vec3(doc["bounds_min"]),
            bounds_max=_vec3(doc["bounds_max"]),
            start=_vec3(doc["start"]),
            goal=_vec3(doc["goal"]),
            seed=int(doc["seed"]),
            obstacles=obstacles,
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"{source}: malformed scenario: {exc}") from exc
    unknown = set(doc) - {"bounds_min", "bounds_max", "start", "goal", "seed", "obstacles"}
    if unknown:
        raise ParseError(f"{source}: unknown fields {sorted(unknown)}")
    validate_scenario(scenario)
    return scenario


def _vec3(v) -> Vec3:
    x, y, z = v
    return (float(x), float(y), float(z))


def save_scenario(s: Scenario, path) -> None:
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(s), fh, indent=2)
        fh.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a JSON object at top level")
    return scenario_from_dict(doc, source=str(path))
