"""
Connecting segment sets and mutual-nearest stitching tuples

d(p, I) is measured to the isoline as a continuous closed polyline, while
the nearest-point map C snaps to the resampled points, since stitches must
land on path points.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from ..geometry.workspace import point_ring_distance

DistanceCache = Dict[Tuple[int, int], np.ndarray]


@dataclass(frozen=True, order=True)
class StitchingTuple:
    """Mutually nearest pair: point p_index of I_u and point q_index of I_v"""

    p_index: int
    q_index: int
    u: int
    v: int

    def reversed(self) -> "StitchingTuple":
        return StitchingTuple(self.q_index, self.p_index, self.v, self.u)


def polyline_distances(u, z, cache: Optional[DistanceCache] = None) -> np.ndarray:
    """d(p, I_z) for every point p of I_u"""
    if cache is not None and (u.id, z.id) in cache:
        return cache[(u.id, z.id)]
    distances = point_ring_distance(u.points, z.points)
    if cache is not None:
        cache[(u.id, z.id)] = distances
    return distances


def connecting_segment_set(u, v, all_vertices: Iterable, cache: Optional[DistanceCache] = None) -> Set[int]:
    """
    Points of I_u strictly closer to I_v than to any other isoline of v's layer

    Args:
        u, v: Isovertices in adjacent layers
        all_vertices: Every isovertex of the graph
        cache: Optional memo of polyline distances keyed by (u.id, z.id)

    Returns:
        Set of point indices on I_u (ties with another isoline are excluded)
    """
    if abs(u.layer - v.layer) != 1:
        raise ValueError(f"connecting segment set needs adjacent layers, got {u.layer} and {v.layer}")
    to_v = polyline_distances(u, v, cache)
    keep = np.ones(len(to_v), dtype=bool)
    for z in all_vertices:
        if z.id == v.id or z.layer != v.layer:
            continue
        keep &= to_v < polyline_distances(u, z, cache)
    return set(int(i) for i in np.nonzero(keep)[0])


def stitching_tuples(u, v, all_vertices: Iterable, cache: Optional[DistanceCache] = None) -> List[StitchingTuple]:
    """
    All mutual discrete nearest pairs between O_{u->v} and O_{v->u}

    The nearest point maps use every resampled point of the target isoline
    (ties go to the lowest index). The list is sorted by p_index.
    """
    all_vertices = list(all_vertices)
    forward = connecting_segment_set(u, v, all_vertices, cache)
    if not forward:
        return []
    backward = connecting_segment_set(v, u, all_vertices, cache)
    if not backward:
        return []

    distance = cdist(u.points, v.points)
    nearest_on_v = np.argmin(distance, axis=1)
    nearest_on_u = np.argmin(distance, axis=0)

    tuples = []
    for p in sorted(forward):
        q = int(nearest_on_v[p])
        if q in backward and int(nearest_on_u[q]) == p:
            tuples.append(StitchingTuple(p, q, u.id, v.id))
    return tuples


def closest_pair(a_points: np.ndarray, b_points: np.ndarray) -> Tuple[int, int, float]:
    """Globally closest point pair (lowest indices on ties) and its distance"""
    distance = cdist(a_points, b_points)
    flat = int(np.argmin(distance))
    p, q = np.unravel_index(flat, distance.shape)
    return int(p), int(q), float(distance[p, q])


# consecutive path points never lie further apart than this many step lengths
CONTINUITY_FACTOR = 2.5


def gap_limit(step: float) -> float:
    return CONTINUITY_FACTOR * step


def stitch_gap(a_points: np.ndarray, p: int, b_points: np.ndarray, q: int) -> float:
    """
    Longest jump a stitch at (a[p], b[q]) puts on the path

    Splicing b into a before a[p] links a[p-1] -> b[q] and b[q-1] -> a[p];
    the two diagonals are the same for either orientation of the splice.
    """
    first = np.linalg.norm(a_points[p - 1] - b_points[q])
    second = np.linalg.norm(b_points[q - 1] - a_points[p])
    return float(max(first, second))


def mutual_nearest(a_points: np.ndarray, b_points: np.ndarray, a_subset: Iterable[int]) -> List[Tuple[int, int]]:
    """
    Mutual nearest pairs (p, q) with p restricted to ``a_subset``

    Both nearest maps are taken within the restriction, so a point of b is
    matched back only to an eligible point of a.
    """
    subset = np.array(sorted(set(int(i) for i in a_subset)), dtype=int)
    if len(subset) == 0 or len(b_points) == 0:
        return []
    distance = cdist(a_points[subset], b_points)
    nearest_on_b = np.argmin(distance, axis=1)
    nearest_on_a = np.argmin(distance, axis=0)
    return [
        (int(p), int(q))
        for row, (p, q) in enumerate(zip(subset, nearest_on_b))
        if int(nearest_on_a[q]) == row
    ]
