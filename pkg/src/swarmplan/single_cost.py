"""Single-vehicle path cost: length, threat exposure, altitude, turning, climb.

Every term accepts one path of shape (P, 3) or a batch (..., P, 3) and returns
a scalar or (...) array. Infeasibility (touching a threat cylinder, leaving the
altitude band) is the IEEE +inf sentinel, which saturates sums and compares
above every finite cost.
"""

from __future__ import annotations

import numpy as np

from .geometry import point_segment_distance
from .scenario import Scenario, Workspace


def path_length(path):
    """Total Euclidean length over all consecutive waypoint pairs."""
    p = np.asarray(path, dtype=float)
    return np.linalg.norm(np.diff(p, axis=-2), axis=-1).sum(axis=-1)


def threat_cost(path, threats, body_radius, danger_distance):
    """Piecewise-linear proximity penalty against vertical threat cylinders.

    For each (segment, threat) pair, with d the xy-distance from the segment to
    the cylinder axis, R the cylinder radius, r the vehicle body radius and
    d_dgr the danger band width: contributes 0 when d > R + r + d_dgr, the
    sentinel when d <= R + r (contact), and (R + r + d_dgr) - d in between.
    """
    p = np.asarray(path, dtype=float)
    if len(threats) == 0:
        return np.zeros(p.shape[:-2])
    centers = np.stack([t.center for t in threats])          # (T, 2)
    radii = np.array([t.radius for t in threats])            # (T,)
    a = p[..., :-1, None, :2]                                # (..., S, 1, 2)
    b = p[..., 1:, None, :2]
    d = point_segment_distance(a, b, centers)                # (..., S, T)
    hard = radii + body_radius
    soft = hard + danger_distance
    per = np.where(d <= hard, np.inf, np.maximum(soft - d, 0.0))
    return per.sum(axis=(-2, -1))


def altitude_cost(path, workspace: Workspace):
    """Deviation from the preferred altitude, summed over every waypoint.

    A waypoint outside the [z_min, z_max] band makes the whole term the
    sentinel; inside the band each waypoint contributes |z - band midpoint|.
    """
    z = np.asarray(path, dtype=float)[..., 2]
    dev = np.abs(z - workspace.mid_altitude)
    out = (z < workspace.z_min) | (z > workspace.z_max)
    return np.where(out, np.inf, dev).sum(axis=-1)


def smoothness_costs(path):
    """(turning, climb) angle sums.

    Turning: at each interior junction, the angle between the xy projections of
    the incoming and outgoing segments; a zero-length xy projection contributes
    nothing. Climb: each segment's climb angle is atan2(dz, xy length); the sum
    of absolute differences between consecutive segments is returned.
    """
    seg = np.diff(np.asarray(path, dtype=float), axis=-2)
    xy = seg[..., :2]
    u, v = xy[..., :-1, :], xy[..., 1:, :]
    dot = (u * v).sum(axis=-1)
    cross = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    # atan2(0, 0) = 0 covers degenerate xy projections
    turning = np.arctan2(np.abs(cross), dot).sum(axis=-1)

    climb = np.arctan2(seg[..., 2], np.linalg.norm(xy, axis=-1))
    climb_change = np.abs(np.diff(climb, axis=-1)).sum(axis=-1)
    return turning, climb_change


def _weighted_sum(weights, terms):
    """Sum w_i * term_i skipping zero weights, so a disabled term can never
    contribute (0 * inf would be NaN)."""
    total = None
    for w, term in zip(weights, terms):
        if w == 0.0:
            continue
        total = w * term if total is None else total + w * term
    if total is None:
        return np.zeros(np.shape(terms[0]))
    return total


def single_cost(path, scenario: Scenario, n: int):
    """Weighted five-term cost of vehicle n's path (sentinel-aware)."""
    v = scenario.vehicles[n]
    turning, climb = smoothness_costs(path)
    terms = (
        path_length(path),
        threat_cost(path, scenario.threats, v.body_radius, scenario.safety.danger_distance),
        altitude_cost(path, scenario.workspace),
        turning,
        climb,
    )
    return _weighted_sum(v.weights.omega, terms)
