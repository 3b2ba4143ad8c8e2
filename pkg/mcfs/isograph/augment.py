"""
Isograph augmentation

Adds an edge between every pair of isovertices at original-graph distance
2..delta whose isolines can be stitched directly. The tuples of a new edge
come from chaining consecutive stitching tuples along one shortest path
(v_1, ..., v_{k+1}); a chained pair (p_1, p_{k+1}) survives only if the
straight segment between its points stays inside the workspace and crosses
at most k-1 other isolines, and the stitch it makes keeps every path jump
within 2.5 l.
"""

import logging
from typing import Dict, List, Sequence, Set, Tuple

import networkx as nx
import numpy as np
import shapely

from .graph import IsoEdge, Isograph
from .tuples import StitchingTuple, gap_limit, stitch_gap

logger = logging.getLogger(__name__)


def lexicographic_shortest_path(graph: nx.Graph, source: int, target: int) -> List[int]:
    """Shortest path from source to target with the smallest id sequence"""
    to_target = nx.single_source_shortest_path_length(graph, target)
    if source not in to_target:
        raise nx.NetworkXNoPath(f"no path between {source} and {target}")
    path = [source]
    current = source
    while current != target:
        step = to_target[current] - 1
        current = min(w for w in graph.neighbors(current) if to_target.get(w) == step)
        path.append(current)
    return path


def chain_tuples(g: Isograph, path: Sequence[int]) -> List[Tuple[int, int]]:
    """
    All (p_1, p_{k+1}) linked by consecutive tuples along ``path``

    Returns:
        Sorted list of point-index pairs on (I_{path[0]}, I_{path[-1]})
    """
    reach: Dict[int, Set[int]] = {}
    for t in g.tuples(path[0], path[1]):
        reach.setdefault(t.q_index, set()).add(t.p_index)
    for a, b in zip(path[1:-1], path[2:]):
        advanced: Dict[int, Set[int]] = {}
        for t in g.tuples(a, b):
            if t.p_index in reach:
                advanced.setdefault(t.q_index, set()).update(reach[t.p_index])
        reach = advanced
        if not reach:
            return []
    return sorted((p1, pk) for pk, starts in reach.items() for p1 in starts)


class _SegmentFilter:
    """Obstacle and isoline-crossing test for candidate stitch segments"""

    def __init__(self, g: Isograph):
        self.g = g
        self.region = g.workspace.polygon if g.workspace is not None else None
        if self.region is not None:
            shapely.prepare(self.region)
        self.rings = {}
        for vx in g.vertices:
            ring = shapely.LinearRing(vx.points)
            shapely.prepare(ring)
            self.rings[vx.id] = ring

    def admissible(self, u: int, v: int, pairs: List[Tuple[int, int]], hops: int) -> List[Tuple[int, int]]:
        if not pairs:
            return []
        pu = self.g.vertex(u).points
        pv = self.g.vertex(v).points
        coords = np.stack([np.array([pu[p], pv[q]]) for p, q in pairs])
        segments = shapely.linestrings(coords)
        ok = np.ones(len(pairs), dtype=bool)
        if self.region is not None:
            ok &= shapely.covers(self.region, segments)
        crossings = np.zeros(len(pairs), dtype=int)
        for vid, ring in self.rings.items():
            if vid in (u, v):
                continue
            crossings += shapely.intersects(ring, segments)
        ok &= crossings <= hops - 1
        limit = gap_limit(self.g.step)
        ok &= np.array([stitch_gap(pu, p, pv, q) <= limit for p, q in pairs])
        return [pair for pair, keep in zip(pairs, ok) if keep]


def augment(g: Isograph, delta: int) -> Isograph:
    """
    Add augmented edges for pairs at original-graph distance 2..delta

    Distances are measured on the graph without augmented edges, so applying
    augment twice with the same delta adds nothing new. Each new edge weighs
    l * |L_u - L_v|.
    """
    if delta < 2:
        raise ValueError(f"augmentation level must be >= 2, got {delta}")
    base = g.base_graph()
    segment_filter = _SegmentFilter(g)

    new_edges = []
    for u in g.vertex_ids:
        lengths = nx.single_source_shortest_path_length(base, u, cutoff=delta)
        for v in sorted(lengths):
            hops = lengths[v]
            if v <= u or hops < 2 or g.has_edge(u, v):
                continue
            path = lexicographic_shortest_path(base, u, v)
            pairs = segment_filter.admissible(u, v, chain_tuples(g, path), hops)
            if not pairs:
                logger.debug("Augmentation (%d, %d): no admissible tuple chain", u, v)
                continue
            tuples = [StitchingTuple(p, q, u, v) for p, q in pairs]
            weight = g.step * abs(g.vertex(u).layer - g.vertex(v).layer)
            new_edges.append(IsoEdge(u, v, tuples, "augmented", weight, tuple(path)))

    logger.info("Augmentation (delta=%d) added %d edges", delta, len(new_edges))
    return g.with_edges(new_edges)
