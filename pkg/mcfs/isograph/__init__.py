"""
Isograph construction: stitching tuples, adjacency and augmentation
"""

from .tuples import (
    CONTINUITY_FACTOR,
    StitchingTuple,
    closest_pair,
    connecting_segment_set,
    gap_limit,
    mutual_nearest,
    stitch_gap,
    stitching_tuples,
)
from .graph import IsoEdge, Isograph, Isovertex, bridge_components, build_isograph, edge_key
from .augment import augment, chain_tuples, lexicographic_shortest_path

__all__ = [
    "CONTINUITY_FACTOR",
    "StitchingTuple",
    "gap_limit",
    "mutual_nearest",
    "stitch_gap",
    "closest_pair",
    "connecting_segment_set",
    "stitching_tuples",
    "IsoEdge",
    "Isograph",
    "Isovertex",
    "bridge_components",
    "build_isograph",
    "edge_key",
    "augment",
    "chain_tuples",
    "lexicographic_shortest_path",
]
