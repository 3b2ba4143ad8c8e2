"""
Discrete curvature of point sequences

kappa(p) = turning angle at p / mean length of the two segments meeting at p.
For a regular N-gon of radius r this tends to 1/r.
"""

import math
from typing import Sequence

import numpy as np


def turning_curvature(prev_point, point, next_point) -> float:
    """Curvature at ``point`` given its two neighbours"""
    a = np.asarray(point, dtype=float) - np.asarray(prev_point, dtype=float)
    b = np.asarray(next_point, dtype=float) - np.asarray(point, dtype=float)
    la = math.hypot(a[0], a[1])
    lb = math.hypot(b[0], b[1])
    if la == 0.0 or lb == 0.0:
        raise ValueError("curvature undefined: coincident neighbouring points")
    cross = a[0] * b[1] - a[1] * b[0]
    dot = a[0] * b[0] + a[1] * b[1]
    angle = math.atan2(abs(cross), dot)
    return angle / (0.5 * (la + lb))


def discrete_curvature(points: Sequence, index: int) -> float:
    """Curvature at ``points[index]`` with cyclic neighbours"""
    n = len(points)
    if n < 3:
        raise ValueError("curvature needs at least 3 points")
    return turning_curvature(points[(index - 1) % n], points[index], points[(index + 1) % n])


def curvature_profile(points: np.ndarray, closed: bool = True) -> np.ndarray:
    """
    Curvature at every point (closed) or every interior point (open)

    Points whose neighbours coincide with them are skipped.
    """
    points = np.asarray(points, dtype=float)
    n = len(points)
    if n < 3:
        return np.zeros(0)
    if closed:
        prev_pts = np.roll(points, 1, axis=0)
        next_pts = np.roll(points, -1, axis=0)
        mid = points
    else:
        prev_pts, mid, next_pts = points[:-2], points[1:-1], points[2:]
    a = mid - prev_pts
    b = next_pts - mid
    la = np.hypot(a[:, 0], a[:, 1])
    lb = np.hypot(b[:, 0], b[:, 1])
    valid = (la > 0) & (lb > 0)
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = (a * b).sum(axis=1)
    angle = np.arctan2(np.abs(cross), dot)
    return angle[valid] / (0.5 * (la[valid] + lb[valid]))


def mean_curvature(points: np.ndarray, closed: bool = True) -> float:
    profile = curvature_profile(points, closed)
    return float(profile.mean()) if len(profile) else 0.0
