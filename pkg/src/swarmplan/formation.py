"""Formation-keeping model: weighted shape-error quadratic forms on a vehicle graph.

The desired formation is a rigid arrangement of N vehicle reference positions
together with an oriented connectivity graph. Shape error for one vehicle is a
weighted sum of squared deviations of its pairwise offsets from the reference
offsets, evaluated either edge-by-edge (`pairwise_error_oracle`) or through the
incidence-matrix quadratic form (`formation_error_at`). Positions closer than
the safety threshold switch the error to the infeasibility sentinel (+inf).
"""

from __future__ import annotations

import numpy as np

from .geometry import pairwise_distances


class FormationGraph:
    """Oriented vehicle graph with per-vehicle edge weights and reference shape.

    Args:
        incidence: (N, M) matrix; each column holds exactly one +1 (head) and
            one -1 (tail), all other entries 0.
        edge_weights: (N, M) nonnegative matrix; row n holds vehicle n's weight
            per edge, strictly positive exactly on edges incident to n.
        references: (N, 3) reference positions defining the desired shape.

    The structural rules above are enforced here, at construction; scenario
    files are not trusted to satisfy them.
    """

    def __init__(self, incidence, edge_weights, references):
        incidence = np.asarray(incidence, dtype=int)
        edge_weights = np.asarray(edge_weights, dtype=float)
        references = np.asarray(references, dtype=float)

        if incidence.ndim != 2:
            raise ValueError("incidence must be a 2-D matrix")
        n, m = incidence.shape
        if edge_weights.shape != (n, m):
            raise ValueError("edge_weights shape must match incidence")
        if references.shape != (n, 3):
            raise ValueError("references must have shape (N, 3)")
        for e in range(m):
            col = incidence[:, e]
            if (col == 1).sum() != 1 or (col == -1).sum() != 1 or np.abs(col).sum() != 2:
                raise ValueError(f"incidence column {e} must contain exactly one +1 and one -1")
        if (edge_weights < 0).any():
            raise ValueError("edge weights must be nonnegative")
        if ((edge_weights > 0) != (incidence != 0)).any():
            raise ValueError("edge weights must be positive exactly on incident edges")
        if not self._connected(incidence):
            raise ValueError("formation graph must be connected")

        self.incidence = incidence
        self.edge_weights = edge_weights
        self.references = references
        self.n_vehicles = n
        self.n_edges = m
        self.heads = np.argmax(incidence == 1, axis=0)
        self.tails = np.argmax(incidence == -1, axis=0)
        # per-vehicle quadratic forms Q_n = Dhat diag(What_n) Dhat^T, shape (N, 3N, 3N)
        dhat = expand_incidence(self)
        self.quad_forms = np.stack(
            [dhat @ np.diag(np.kron(edge_weights[i], np.ones(3))) @ dhat.T for i in range(n)]
        )

    @staticmethod
    def _connected(incidence):
        n, m = incidence.shape
        if n == 0:
            return False
        adj = [[] for _ in range(n)]
        for e in range(m):
            ends = np.nonzero(incidence[:, e])[0]
            if len(ends) == 2:
                adj[ends[0]].append(ends[1])
                adj[ends[1]].append(ends[0])
        seen = {0}
        stack = [0]
        while stack:
            for j in adj[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == n


def expand_incidence(graph: FormationGraph) -> np.ndarray:
    """Kronecker expansion of the incidence matrix to coordinate space, (3N, 3M)."""
    return np.kron(graph.incidence, np.eye(3))


def collision_mask(positions, safe_distance, radii):
    """Per-vehicle flag: True where some other vehicle is at or inside the
    safety threshold safe_distance + r_n + r_other. positions (..., N, 3) -> (..., N)."""
    positions = np.asarray(positions, dtype=float)
    radii = np.asarray(radii, dtype=float)
    n = positions.shape[-2]
    dist = pairwise_distances(positions)
    thresh = safe_distance + radii[:, None] + radii[None, :]
    hit = dist <= thresh
    off_diag = ~np.eye(n, dtype=bool)
    return (hit & off_diag).any(axis=-1)


def _shape_error(positions, graph):
    """Quadratic-form shape error for every vehicle, (..., N, 3) -> (..., N)."""
    err = np.asarray(positions, dtype=float) - graph.references
    flat = err.reshape(err.shape[:-2] + (3 * graph.n_vehicles,))
    return np.einsum("...i,nij,...j->...n", flat, graph.quad_forms, flat)


def formation_error_at(positions, graph: FormationGraph, n: int, safe_distance, radii):
    """Shape error of vehicle n at one synchronized set of positions.

    positions: (..., N, 3). Returns the quadratic form
    (P - P_ref)^T Dhat What_n Dhat^T (P - P_ref), or +inf when any other
    vehicle sits at or inside vehicle distance safe_distance + r_n + r_other.
    """
    val = _shape_error(positions, graph)[..., n]
    hit = collision_mask(positions, safe_distance, radii)[..., n]
    return np.where(hit, np.inf, val)


def pairwise_error_oracle(positions, graph: FormationGraph, n: int):
    """Edge-by-edge shape error of vehicle n: sum over incident edges (n, j) of
    mu_nj * ||(P_n - P_j) - (R_n - R_j)||^2. No collision handling; used as the
    independent cross-check for the quadratic form."""
    positions = np.asarray(positions, dtype=float)
    refs = graph.references
    total = np.zeros(positions.shape[:-2])
    for e in range(graph.n_edges):
        h, t = graph.heads[e], graph.tails[e]
        if n == h:
            other = t
        elif n == t:
            other = h
        else:
            continue
        dev = (positions[..., n, :] - positions[..., other, :]) - (refs[n] - refs[other])
        total = total + graph.edge_weights[n, e] * (dev * dev).sum(axis=-1)
    return total


def _stack_paths(paths):
    if isinstance(paths, np.ndarray):
        arr = np.asarray(paths, dtype=float)
    else:
        shapes = {np.shape(p) for p in paths}
        if len(shapes) != 1:
            raise ValueError("all paths must share the same waypoint count")
        arr = np.stack([np.asarray(p, dtype=float) for p in paths])
    if arr.ndim < 3 or arr.shape[-1] != 3:
        raise ValueError("paths must stack to shape (..., N, P, 3)")
    return arr


def formation_cost(paths, graph: FormationGraph, n: int, safe_distance, radii):
    """Formation cost of vehicle n: shape error summed over synchronized interior
    waypoints (endpoints excluded; starts and goals are fixed, not optimized)."""
    return formation_cost_all(paths, graph, safe_distance, radii)[..., n]


def formation_cost_all(paths, graph: FormationGraph, safe_distance, radii):
    """Formation cost of every vehicle at once, (..., N, P, 3) -> (..., N)."""
    arr = _stack_paths(paths)
    if arr.shape[-3] != graph.n_vehicles:
        raise ValueError("allocation vehicle count does not match the graph")
    interior = arr[..., 1:-1, :]
    # (..., N, K, 3) -> (..., K, N, 3) so each waypoint index is one broadcast slot
    pts = np.swapaxes(interior, -3, -2)
    err = _shape_error(pts, graph)
    hit = collision_mask(pts, safe_distance, radii)
    return np.where(hit, np.inf, err).sum(axis=-2)
