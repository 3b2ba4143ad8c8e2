"""
Connected Fermat spiral stitching: curvature, tuple selectors and the
unified DFS traversal
"""

from .curvature import curvature_profile, discrete_curvature, mean_curvature, turning_curvature
from .selectors import SELECTOR_KINDS, Selector, select_cfs, select_mcs, select_random
from .stitching import CoveragePath, StitchRecord, preorder_edges, snap_entry, stitch_all, stitch_tree, unified_cfs

__all__ = [
    "curvature_profile",
    "discrete_curvature",
    "mean_curvature",
    "turning_curvature",
    "SELECTOR_KINDS",
    "Selector",
    "select_cfs",
    "select_mcs",
    "select_random",
    "CoveragePath",
    "StitchRecord",
    "preorder_edges",
    "snap_entry",
    "stitch_all",
    "stitch_tree",
    "unified_cfs",
]
