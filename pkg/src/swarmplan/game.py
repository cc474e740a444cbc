"""Joint cost vectors and dominance relations over candidate allocations.

An allocation assigns one path to every vehicle, stacked as (N, P, 3) (or a
batch (..., N, P, 3)). Its cost vector holds one entry per vehicle: the
vehicle's single-path cost plus its formation weight beta times its formation
cost. Plans are compared by Pareto dominance over these vectors.
"""

from __future__ import annotations

import numpy as np

from .formation import _stack_paths, formation_cost_all
from .scenario import Scenario
from .single_cost import single_cost


def joint_cost(allocation, scenario: Scenario):
    """Cost vector of an allocation: (..., N, P, 3) -> (..., N).

    Vehicles with beta == 0 get exactly their single-path cost (the formation
    term is skipped, not multiplied by zero).
    """
    alloc = _stack_paths(allocation)
    n_vehicles = scenario.n_vehicles
    if alloc.shape[-3] != n_vehicles:
        raise ValueError("allocation vehicle count does not match the scenario")
    singles = np.stack(
        [single_cost(alloc[..., n, :, :], scenario, n) for n in range(n_vehicles)],
        axis=-1,
    )
    betas = scenario.betas
    if not betas.any():
        return singles
    formation = formation_cost_all(
        alloc, scenario.graph, scenario.safety.safe_distance, scenario.body_radii
    )
    total = singles.copy()
    active = betas != 0.0
    total[..., active] = total[..., active] + betas[active] * formation[..., active]
    return total


def weakly_dominates(a, b) -> bool:
    """True when cost vector a is no worse than b for every vehicle.

    Sentinel entries follow IEEE semantics: inf <= inf holds, finite <= inf
    holds, inf <= finite does not.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("cost vectors must have equal length")
    return bool(np.all(a <= b))


def pareto_dominates(a, b) -> bool:
    """True when a weakly dominates b and improves at least one vehicle."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("cost vectors must have equal length")
    return bool(np.all(a <= b) and np.any(a < b))


def pareto_front(entries):
    """Filter (item, cost_vector) pairs down to the non-dominated ones.

    Input order is preserved; duplicates of a non-dominated vector are all
    kept (they do not dominate each other).
    """
    entries = [(item, np.asarray(c, dtype=float)) for item, c in entries]
    front = []
    for i, (item, cost) in enumerate(entries):
        dominated = any(
            pareto_dominates(other, cost) for j, (_, other) in enumerate(entries) if j != i
        )
        if not dominated:
            front.append((item, cost))
    return front
