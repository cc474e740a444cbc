"""Spherical-vector particle swarm core.

A candidate path for one vehicle is encoded as K spherical steps
(r, elevation, azimuth): step k moves the previous waypoint by
(r cos(el) cos(az), r cos(el) sin(az), r sin(el)). Decoding walks the steps
from the start, clamps x and y to the workspace, and appends the goal, so a
decoded path always has K+2 waypoints with fixed endpoints. Altitude is not
clamped; the altitude cost term handles band violations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .scenario import Scenario, Workspace

ELEVATION_MAX = 0.5 * math.pi
AZIMUTH_MAX = math.pi
# velocity is clamped to this fraction of each dimension's range
VELOCITY_SPAN = 0.5


class ConfigError(ValueError):
    """Invalid optimizer configuration."""


@dataclass(frozen=True)
class PsoConfig:
    """Swarm optimizer settings.

    c0 is the initial inertia weight; the effective inertia is multiplied by
    inertia_decay once per iteration. c1/c2 scale the pulls toward the personal
    and global bests. r_max bounds the step radius; None defers to
    default_step_limit(scenario) at planning time.
    """

    c0: float = 0.9
    c1: float = 1.5
    c2: float = 1.5
    n_pop: int = 500
    max_it: int = 300
    inertia_decay: float = 0.999
    r_max: float | None = None
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.c0 <= 1.0:
            raise ConfigError("c0 must be in (0, 1]")
        if self.c1 < 0.0 or self.c2 < 0.0:
            raise ConfigError("c1 and c2 must be nonnegative")
        if self.n_pop < 1:
            raise ConfigError("n_pop must be at least 1")
        if self.max_it < 1:
            raise ConfigError("max_it must be at least 1")
        if not 0.0 < self.inertia_decay <= 1.0:
            raise ConfigError("inertia_decay must be in (0, 1]")
        if self.r_max is not None and not self.r_max > 0.0:
            raise ConfigError("r_max must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit an unsigned 64-bit integer")


def default_step_limit(scenario: Scenario) -> float:
    """Default r_max: twice the even-division step of the workspace diagonal."""
    return 2.0 * scenario.workspace.diagonal / (scenario.waypoint_count + 1)


def spherical_bounds(r_max: float):
    """(low, high) per-dimension bounds of one spherical step."""
    low = np.array([0.0, -ELEVATION_MAX, -AZIMUTH_MAX])
    high = np.array([r_max, ELEVATION_MAX, AZIMUTH_MAX])
    return low, high


def spherical_to_path(vec, start, goal, workspace: Workspace):
    """Decode spherical steps (..., K, 3) into waypoints (..., K+2, 3)."""
    vec = np.asarray(vec, dtype=float)
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    k = vec.shape[-2]
    r, el, az = vec[..., 0], vec[..., 1], vec[..., 2]
    flat = r * np.cos(el)
    inc = np.stack([flat * np.cos(az), flat * np.sin(az), r * np.sin(el)], axis=-1)

    batch = vec.shape[:-2]
    pos = np.broadcast_to(start, batch + (3,)).copy()
    points = [pos]
    for i in range(k):
        pos = pos + inc[..., i, :]
        pos[..., 0] = np.clip(pos[..., 0], workspace.x_min, workspace.x_max)
        pos[..., 1] = np.clip(pos[..., 1], workspace.y_min, workspace.y_max)
        points.append(pos)
    points.append(np.broadcast_to(goal, batch + (3,)).copy())
    return np.stack(points, axis=-2)


def path_to_spherical(path):
    """Encode a path's free-waypoint steps back to spherical form (..., K, 3).

    The final segment into the goal is not encoded (decoding re-appends the
    goal). Degenerate steps use r=0, elevation 0, azimuth 0.
    """
    p = np.asarray(path, dtype=float)
    delta = np.diff(p[..., :-1, :], axis=-2)
    r = np.linalg.norm(delta, axis=-1)
    safe = np.where(r > 0.0, r, 1.0)
    el = np.where(r > 0.0, np.arcsin(np.clip(delta[..., 2] / safe, -1.0, 1.0)), 0.0)
    az = np.arctan2(delta[..., 1], delta[..., 0])
    return np.stack([r, el, az], axis=-1)


# ----- particles and swarms ---------------------------------------------------


@dataclass
class Particle:
    """One candidate: spherical position/velocity plus its personal best."""

    position: np.ndarray
    velocity: np.ndarray
    personal_best: np.ndarray
    personal_best_cost: float = math.inf


@dataclass
class Swarm:
    """Array-backed swarm: row i of each array is particle i."""

    positions: np.ndarray       # (n_pop, K, 3)
    velocities: np.ndarray      # (n_pop, K, 3)
    pbest_positions: np.ndarray
    pbest_costs: np.ndarray     # (n_pop,)
    low: np.ndarray = field(repr=False, default=None)
    high: np.ndarray = field(repr=False, default=None)

    @property
    def n_pop(self) -> int:
        return self.positions.shape[0]

    def particle(self, i: int) -> Particle:
        return Particle(
            position=self.positions[i].copy(),
            velocity=self.velocities[i].copy(),
            personal_best=self.pbest_positions[i].copy(),
            personal_best_cost=float(self.pbest_costs[i]),
        )


def _step(positions, velocities, pbest, gbest, inertia, c1, c2, r1, r2, low, high):
    """Shared velocity/position update with bound clamping.

    Velocity components are clamped to VELOCITY_SPAN times the dimension range;
    positions are clamped to bounds and the velocity along any clamped
    dimension is zeroed.
    """
    vel = inertia * velocities + c1 * r1 * (pbest - positions) + c2 * r2 * (gbest - positions)
    vmax = VELOCITY_SPAN * (high - low)
    vel = np.clip(vel, -vmax, vmax)
    pos = positions + vel
    clamped = (pos < low) | (pos > high)
    pos = np.clip(pos, low, high)
    vel = np.where(clamped, 0.0, vel)
    return pos, vel


def _require_r_max(cfg: PsoConfig) -> float:
    if cfg.r_max is None:
        raise ConfigError("r_max must be resolved before particle updates")
    return cfg.r_max


def update_particle(particle: Particle, global_best, cfg: PsoConfig, rng,
                    inertia: float | None = None) -> Particle:
    """One velocity/position update of a single particle.

    Two uniform draws are taken per dimension (rng.random, personal pull first).
    inertia defaults to cfg.c0; planners pass the decayed per-iteration value.
    """
    low, high = spherical_bounds(_require_r_max(cfg))
    w = cfg.c0 if inertia is None else inertia
    r1 = rng.random(particle.position.shape)
    r2 = rng.random(particle.position.shape)
    pos, vel = _step(
        particle.position, particle.velocity, particle.personal_best,
        np.asarray(global_best, dtype=float), w, cfg.c1, cfg.c2, r1, r2, low, high,
    )
    return Particle(
        position=pos,
        velocity=vel,
        personal_best=particle.personal_best.copy(),
        personal_best_cost=particle.personal_best_cost,
    )


def update_swarm(swarm: Swarm, global_best, cfg: PsoConfig, rng, inertia: float) -> None:
    """In-place update of every particle (same math and draw order as
    update_particle, vectorized across rows)."""
    r1 = rng.random(swarm.positions.shape)
    r2 = rng.random(swarm.positions.shape)
    swarm.positions, swarm.velocities = _step(
        swarm.positions, swarm.velocities, swarm.pbest_positions,
        np.asarray(global_best, dtype=float), inertia, cfg.c1, cfg.c2, r1, r2,
        swarm.low, swarm.high,
    )


def chord_steps(start, goal, waypoint_count: int) -> np.ndarray:
    """Spherical encoding of the straight start->goal chord with equal steps."""
    start = np.asarray(start, dtype=float)
    goal = np.asarray(goal, dtype=float)
    delta = (goal - start) / (waypoint_count + 1)
    r = float(np.linalg.norm(delta))
    if r == 0.0:
        return np.zeros((waypoint_count, 3))
    el = math.asin(max(-1.0, min(1.0, delta[2] / r)))
    az = math.atan2(delta[1], delta[0])
    return np.tile(np.array([r, el, az]), (waypoint_count, 1))


def _init_swarm_raw(start, goal, waypoint_count, cfg: PsoConfig, rng, r_max: float) -> Swarm:
    low, high = spherical_bounds(r_max)
    positions = rng.uniform(low, high, size=(cfg.n_pop, waypoint_count, 3))
    anchor = chord_steps(start, goal, waypoint_count)
    if anchor[0, 0] > r_max:
        raise ConfigError("r_max is too small for the straight-chord anchor step")
    positions[0] = anchor
    return Swarm(
        positions=positions,
        velocities=np.zeros_like(positions),
        pbest_positions=positions.copy(),
        pbest_costs=np.full(cfg.n_pop, np.inf),
        low=low,
        high=high,
    )


def init_swarm(scenario: Scenario, n: int, cfg: PsoConfig, rng) -> Swarm:
    """Fresh swarm for vehicle n: particle 0 is the straight-chord anchor, the
    rest are uniform within the spherical bounds; all velocities start at zero
    and personal-best costs at the sentinel (no evaluations yet)."""
    r_max = cfg.r_max if cfg.r_max is not None else default_step_limit(scenario)
    v = scenario.vehicles[n]
    return _init_swarm_raw(v.start, v.goal, scenario.waypoint_count, cfg, rng, r_max)
