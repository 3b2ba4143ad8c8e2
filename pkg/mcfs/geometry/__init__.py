"""
Geometry: workspaces, distance fields and layered isolines
"""

from .workspace import (
    Point2,
    Workspace,
    load_workspace,
    save_workspace,
    point_ring_distance,
    point_segment_distance,
    signed_area,
    workspace_diameter,
)
from .distance_field import DistanceField, build_distance_field
from .isolines import Isoline, extract_isolines, resample_equidistant
from .shapes import (
    BENCHMARK_SUITE,
    create_annulus_workspace,
    create_benchmark_workspace,
    create_blob_with_two_obstacles,
    create_disc_workspace,
    create_double_hole_blob,
    create_office_workspace,
    create_square_workspace,
    create_strip_workspace,
    create_two_lobed_blob,
)

__all__ = [
    "Point2",
    "Workspace",
    "load_workspace",
    "save_workspace",
    "point_ring_distance",
    "point_segment_distance",
    "signed_area",
    "workspace_diameter",
    "DistanceField",
    "build_distance_field",
    "Isoline",
    "extract_isolines",
    "resample_equidistant",
    "BENCHMARK_SUITE",
    "create_annulus_workspace",
    "create_benchmark_workspace",
    "create_blob_with_two_obstacles",
    "create_disc_workspace",
    "create_double_hole_blob",
    "create_office_workspace",
    "create_square_workspace",
    "create_strip_workspace",
    "create_two_lobed_blob",
]
