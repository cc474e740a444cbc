"""Planning drivers: cooperative multi-swarm search and a rigid-body baseline.

plan_game runs one swarm per vehicle. At every iteration the particles with the
same index across swarms form one candidate allocation; the incumbent plan is
replaced whenever a candidate is no worse for every vehicle at once (ties
accepted, newest wins), which makes the recorded incumbent cost history
componentwise nonincreasing. Each swarm's global attractor is the incumbent's
path for its own vehicle.

plan_rigid collapses the fleet to a single virtual vehicle at the formation
centroid, inflates every threat by the formation circumradius plus body radius,
plans the virtual vehicle alone, and shifts the result by each vehicle's
reference offset, preserving the shape exactly.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .formation import formation_cost_all
from .game import joint_cost
from .geometry import pairwise_distances, point_segment_distance
from .scenario import Scenario, ScenarioValidationError, Threat, validate
from .single_cost import (
    _weighted_sum,
    altitude_cost,
    path_length,
    single_cost,
    smoothness_costs,
    threat_cost,
)
from .spso import (
    PsoConfig,
    Swarm,
    _init_swarm_raw,
    default_step_limit,
    init_swarm,
    spherical_to_path,
    update_swarm,
)


@dataclass
class PlanResult:
    """Outcome of one planning run.

    best_allocation: (N, K+2, 3) waypoints per vehicle.
    best_costs: (N,) final cost vector (+inf marks an infeasible vehicle).
    history: (iterations+1, N) incumbent cost after initialization and after
        every iteration; componentwise nonincreasing.
    """

    best_allocation: np.ndarray
    best_costs: np.ndarray
    history: np.ndarray
    iterations_run: int
    seed: int
    wall_time: float


@dataclass
class PlanMetrics:
    """Metrics recomputed from the allocation alone (stored costs not trusted)."""

    path_lengths: np.ndarray
    single_costs: np.ndarray
    formation_costs: np.ndarray
    total_costs: np.ndarray
    log_costs: np.ndarray
    min_separation: float
    min_threat_clearance: float
    vehicle_feasible: np.ndarray
    feasible: bool


def _prepare(scenario: Scenario, cfg: PsoConfig) -> PsoConfig:
    violations = validate(scenario)
    if violations:
        raise ScenarioValidationError(violations)
    if cfg.r_max is None:
        cfg = replace(cfg, r_max=default_step_limit(scenario))
    return cfg


def _chunked(fn, batch, threads: int):
    """Apply fn to row chunks of batch and re-concatenate in order. Pure fn +
    fixed order keeps results identical for every thread count."""
    if threads <= 1 or batch.shape[0] <= 1:
        return fn(batch)
    chunks = [c for c in np.array_split(batch, threads) if c.shape[0]]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(fn, chunks)), axis=0)


def plan_game(scenario: Scenario, cfg: PsoConfig, threads: int = 1) -> PlanResult:
    """Cooperative planning: one swarm per vehicle, index-paired candidates,
    incumbent replaced only by candidates that are no worse for every vehicle."""
    t0 = time.perf_counter()
    cfg = _prepare(scenario, cfg)
    rng = np.random.default_rng(int(cfg.seed))
    n_vehicles = scenario.n_vehicles
    swarms = [init_swarm(scenario, n, cfg, rng) for n in range(n_vehicles)]
    ws = scenario.workspace
    starts, goals = scenario.starts, scenario.goals

    def decode_all():
        per_vehicle = [
            spherical_to_path(swarms[n].positions, starts[n], goals[n], ws)
            for n in range(n_vehicles)
        ]
        return np.stack(per_vehicle, axis=1)  # (n_pop, N, K+2, 3)

    # incumbent starts at the straight-chord anchors (particle 0 of each swarm)
    inc_positions = np.stack([sw.positions[0].copy() for sw in swarms])
    inc_alloc = np.stack(
        [spherical_to_path(inc_positions[n], starts[n], goals[n], ws) for n in range(n_vehicles)]
    )
    inc_costs = joint_cost(inc_alloc, scenario)
    history = [inc_costs.copy()]

    inertia = cfg.c0
    for _ in range(cfg.max_it):
        alloc = decode_all()
        costs = _chunked(lambda a: joint_cost(a, scenario), alloc, threads)

        # sequential acceptance scan; candidates that cannot dominate the
        # original incumbent cannot dominate any accepted (tighter) one either
        accepted = None
        current = inc_costs
        for i in np.nonzero((costs <= inc_costs).all(axis=1))[0]:
            if (costs[i] <= current).all():
                current = costs[i]
                accepted = int(i)
        if accepted is not None:
            inc_costs = costs[accepted].copy()
            inc_alloc = alloc[accepted].copy()
            inc_positions = np.stack([sw.positions[accepted].copy() for sw in swarms])
        history.append(inc_costs.copy())

        for n, sw in enumerate(swarms):
            better = costs[:, n] < sw.pbest_costs
            sw.pbest_costs[better] = costs[better, n]
            sw.pbest_positions[better] = sw.positions[better]
            update_swarm(sw, inc_positions[n], cfg, rng, inertia)
        inertia *= cfg.inertia_decay

    return PlanResult(
        best_allocation=inc_alloc,
        best_costs=inc_costs,
        history=np.stack(history),
        iterations_run=cfg.max_it,
        seed=int(cfg.seed),
        wall_time=time.perf_counter() - t0,
    )


def plan_rigid(scenario: Scenario, cfg: PsoConfig, threads: int = 1) -> PlanResult:
    """Rigid-body baseline: plan one virtual vehicle against threats inflated
    by the formation circumradius, then translate its path to every vehicle."""
    t0 = time.perf_counter()
    cfg = _prepare(scenario, cfg)
    rng = np.random.default_rng(int(cfg.seed))
    n_vehicles = scenario.n_vehicles
    ws = scenario.workspace

    ref_centroid = scenario.references.mean(axis=0)
    offsets = scenario.references - ref_centroid
    circumradius = float(np.linalg.norm(offsets, axis=1).max())
    body = float(scenario.body_radii.max())
    v_start = scenario.starts.mean(axis=0)
    v_goal = scenario.goals.mean(axis=0)
    inflated = [
        Threat(t.center_x, t.center_y, t.radius + circumradius + body, t.kind)
        for t in scenario.threats
    ]
    omega = scenario.vehicles[0].weights.omega

    def virtual_cost(paths):
        turning, climb = smoothness_costs(paths)
        terms = (
            path_length(paths),
            threat_cost(paths, inflated, body, scenario.safety.danger_distance),
            altitude_cost(paths, ws),
            turning,
            climb,
        )
        return _weighted_sum(omega, terms)

    swarm = _init_swarm_raw(v_start, v_goal, scenario.waypoint_count, cfg, rng, cfg.r_max)
    inc_position = swarm.positions[0].copy()
    inc_cost = float(virtual_cost(spherical_to_path(inc_position, v_start, v_goal, ws)))
    history = [np.full(n_vehicles, inc_cost)]

    inertia = cfg.c0
    for _ in range(cfg.max_it):
        paths = spherical_to_path(swarm.positions, v_start, v_goal, ws)
        costs = _chunked(virtual_cost, paths, threads)
        best = int(np.argmin(costs))
        if costs[best] < inc_cost:
            inc_cost = float(costs[best])
            inc_position = swarm.positions[best].copy()
        history.append(np.full(n_vehicles, inc_cost))

        better = costs < swarm.pbest_costs
        swarm.pbest_costs[better] = costs[better]
        swarm.pbest_positions[better] = swarm.positions[better]
        update_swarm(swarm, inc_position, cfg, rng, inertia)
        inertia *= cfg.inertia_decay

    virtual_path = spherical_to_path(inc_position, v_start, v_goal, ws)
    members = virtual_path[None, :, :] + offsets[:, None, :]
    return PlanResult(
        best_allocation=members,
        best_costs=joint_cost(members, scenario),
        history=np.stack(history),
        iterations_run=cfg.max_it,
        seed=int(cfg.seed),
        wall_time=time.perf_counter() - t0,
    )


# ----- geometric rechecks and metrics ------------------------------------------


def min_separation(allocation) -> float:
    """Smallest inter-vehicle distance over synchronized waypoints (endpoints
    included), computed from the waypoints alone."""
    alloc = np.asarray(allocation, dtype=float)
    per_waypoint = np.swapaxes(alloc, 0, 1)  # (P, N, 3)
    d = pairwise_distances(per_waypoint)
    n = alloc.shape[0]
    off = ~np.eye(n, dtype=bool)
    return float(d[:, off].min())


def min_threat_clearance(allocation, threats, body_radii) -> float:
    """Smallest xy clearance between any path segment and any threat cylinder
    surface, body radius included; positive means no contact. inf when the
    scenario has no threats."""
    alloc = np.asarray(allocation, dtype=float)
    if len(threats) == 0:
        return float("inf")
    centers = np.stack([t.center for t in threats])
    radii = np.array([t.radius for t in threats])
    body_radii = np.asarray(body_radii, dtype=float)
    a = alloc[:, :-1, None, :2]
    b = alloc[:, 1:, None, :2]
    d = point_segment_distance(a, b, centers)  # (N, S, T)
    clearance = d - radii - body_radii[:, None, None]
    return float(clearance.min())


def evaluate_plan(result: PlanResult, scenario: Scenario) -> PlanMetrics:
    """Recompute every reported metric from the allocation in the result."""
    alloc = np.asarray(result.best_allocation, dtype=float)
    n_vehicles = scenario.n_vehicles
    singles = np.array([float(single_cost(alloc[n], scenario, n)) for n in range(n_vehicles)])
    formations = formation_cost_all(
        alloc, scenario.graph, scenario.safety.safe_distance, scenario.body_radii
    )
    totals = joint_cost(alloc, scenario)
    with np.errstate(divide="ignore"):
        log_costs = np.log(totals)
    vehicle_feasible = np.isfinite(totals)
    return PlanMetrics(
        path_lengths=path_length(alloc),
        single_costs=singles,
        formation_costs=formations,
        total_costs=totals,
        log_costs=log_costs,
        min_separation=min_separation(alloc),
        min_threat_clearance=min_threat_clearance(
            alloc, scenario.threats, scenario.body_radii
        ),
        vehicle_feasible=vehicle_feasible,
        feasible=bool(vehicle_feasible.all()),
    )
