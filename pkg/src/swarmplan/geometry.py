"""Segment/point distance helpers shared by cost terms and safety rechecks."""

from __future__ import annotations

import numpy as np


def point_segment_distance(seg_a, seg_b, point):
    """Distance from `point` to the segment `seg_a`->`seg_b`.

    All arguments broadcast against each other on leading axes; the last axis
    holds coordinates (2-D or 3-D). Zero-length segments degrade to point
    distance.
    """
    seg_a = np.asarray(seg_a, dtype=float)
    seg_b = np.asarray(seg_b, dtype=float)
    point = np.asarray(point, dtype=float)
    d = seg_b - seg_a
    l2 = (d * d).sum(axis=-1)
    t = ((point - seg_a) * d).sum(axis=-1)
    # parameter of the closest point, guarded against zero-length segments
    t = np.where(l2 > 0.0, t / np.where(l2 > 0.0, l2, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = seg_a + t[..., None] * d
    return np.linalg.norm(point - closest, axis=-1)


def pairwise_distances(positions):
    """All pairwise Euclidean distances among positions (..., N, 3) -> (..., N, N)."""
    p = np.asarray(positions, dtype=float)
    diff = p[..., :, None, :] - p[..., None, :, :]
    return np.linalg.norm(diff, axis=-1)
