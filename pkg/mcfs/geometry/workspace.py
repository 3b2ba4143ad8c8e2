"""
Workspace polygon with obstacle holes

A workspace is one exterior ring plus zero or more hole rings. Rings are
stored open (no repeated closing vertex) as float arrays of shape (N, 2):
the exterior counterclockwise, every hole clockwise, so that the sign of the
shoelace area tells a ring's role.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
import shapely
from shapely.geometry import LinearRing, Polygon

from ..exceptions import WorkspaceError

logger = logging.getLogger(__name__)

AREA_EPS = 1e-12


@dataclass(frozen=True)
class Point2:
    """A point in workspace units"""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise WorkspaceError(f"non-finite point ({self.x}, {self.y})")

    @classmethod
    def of(cls, xy: Sequence[float]) -> "Point2":
        return cls(float(xy[0]), float(xy[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def __iter__(self):
        yield self.x
        yield self.y


def signed_area(ring: np.ndarray) -> float:
    """Shoelace area of an open ring; positive when counterclockwise"""
    x = ring[:, 0]
    y = ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def ring_perimeter(ring: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(ring, -1, axis=0) - ring, axis=1).sum())


def open_ring(coords) -> np.ndarray:
    """Convert coordinates to an (N, 2) array without the closing duplicate"""
    ring = np.asarray(coords, dtype=float)
    if ring.ndim != 2 or ring.shape[1] != 2:
        raise WorkspaceError(f"ring must be a list of [x, y] pairs, got shape {ring.shape}")
    if not np.all(np.isfinite(ring)):
        raise WorkspaceError("ring contains non-finite coordinates")
    if len(ring) > 1 and np.allclose(ring[0], ring[-1]):
        ring = ring[:-1]
    # consecutive duplicates would create zero-length segments
    keep = np.ones(len(ring), dtype=bool)
    keep[1:] = np.any(np.diff(ring, axis=0) != 0.0, axis=1)
    return ring[keep]


def ring_segments(ring: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Segment start and end points of a closed ring"""
    return ring, np.roll(ring, -1, axis=0)


def point_segment_distance(
    points: np.ndarray,
    starts: np.ndarray,
    ends: np.ndarray,
    chunk: int = 2048
) -> np.ndarray:
    """
    Exact minimum distance from each point to a set of segments

    Args:
        points: (M, 2) query points
        starts: (S, 2) segment start points
        ends: (S, 2) segment end points
        chunk: number of points evaluated per vectorized block

    Returns:
        (M,) minimum point-to-segment distances
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    direction = ends - starts
    length2 = np.einsum("ij,ij->i", direction, direction)
    safe_length2 = np.where(length2 > 0.0, length2, 1.0)

    out = np.empty(len(points))
    for lo in range(0, len(points), chunk):
        block = points[lo:lo + chunk, None, :]
        offset = block - starts[None, :, :]
        t = np.einsum("msk,sk->ms", offset, direction) / safe_length2
        t = np.clip(t, 0.0, 1.0)
        residual = offset - t[:, :, None] * direction[None, :, :]
        dist2 = np.einsum("msk,msk->ms", residual, residual)
        out[lo:lo + chunk] = np.sqrt(dist2.min(axis=1))
    return out


def point_ring_distance(points: np.ndarray, ring: np.ndarray) -> np.ndarray:
    """Distance from points to the closed polyline through ``ring``"""
    starts, ends = ring_segments(ring)
    return point_segment_distance(points, starts, ends)


@dataclass(eq=False)
class Workspace:
    """
    Region to cover: exterior ring minus obstacle holes

    Input rings may come in either orientation; they are normalized so the
    exterior is counterclockwise and every hole is clockwise, then validated.
    """

    exterior: np.ndarray
    holes: List[np.ndarray] = field(default_factory=list)
    name: str = "workspace"

    def __post_init__(self):
        exterior = open_ring(self.exterior)
        if len(exterior) < 3:
            raise WorkspaceError(f"degenerate workspace '{self.name}': exterior needs >= 3 distinct vertices")
        if abs(signed_area(exterior)) <= AREA_EPS:
            raise WorkspaceError(f"degenerate workspace '{self.name}': zero area")
        if signed_area(exterior) < 0:
            exterior = exterior[::-1].copy()

        holes = []
        for index, coords in enumerate(self.holes):
            hole = open_ring(coords)
            if len(hole) < 3 or abs(signed_area(hole)) <= AREA_EPS:
                raise WorkspaceError(f"hole {index} of '{self.name}' is degenerate")
            if signed_area(hole) > 0:
                hole = hole[::-1].copy()
            holes.append(hole)

        self.exterior = exterior
        self.holes = holes
        self._validate()

    def _validate(self):
        if not LinearRing(self.exterior).is_simple:
            raise WorkspaceError(f"exterior ring of '{self.name}' is self-intersecting")
        outer = Polygon(self.exterior)
        hole_polygons = []
        for index, hole in enumerate(self.holes):
            if not LinearRing(hole).is_simple:
                raise WorkspaceError(f"hole {index} of '{self.name}' is self-intersecting")
            hole_polygon = Polygon(hole)
            if not outer.contains_properly(hole_polygon):
                raise WorkspaceError(f"hole {index} of '{self.name}' is not strictly inside the exterior")
            for other_index, other in enumerate(hole_polygons):
                if hole_polygon.intersects(other):
                    raise WorkspaceError(f"holes {other_index} and {index} of '{self.name}' overlap")
            hole_polygons.append(hole_polygon)
        if self.polygon.area <= AREA_EPS:
            raise WorkspaceError(f"degenerate workspace '{self.name}': zero area")

    # ------------------------------------------------------------------

    @cached_property
    def polygon(self) -> Polygon:
        return Polygon(self.exterior, self.holes)

    @property
    def rings(self) -> List[np.ndarray]:
        return [self.exterior] + list(self.holes)

    @property
    def area(self) -> float:
        return float(self.polygon.area)

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        """(x_min, y_min, x_max, y_max)"""
        return tuple(float(b) for b in self.polygon.bounds)

    @cached_property
    def boundary_segments(self) -> Tuple[np.ndarray, np.ndarray]:
        starts, ends = zip(*(ring_segments(ring) for ring in self.rings))
        return np.vstack(starts), np.vstack(ends)

    def distance_to_boundary(self, points: np.ndarray) -> np.ndarray:
        """Exact unsigned distance from points to the nearest ring segment"""
        starts, ends = self.boundary_segments
        return point_segment_distance(points, starts, ends)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return shapely.contains_xy(self.polygon, points[:, 0], points[:, 1])

    def diameter(self) -> float:
        """Largest distance between two exterior vertices"""
        ext = self.exterior
        diff = ext[:, None, :] - ext[None, :, :]
        return float(np.sqrt((diff ** 2).sum(-1)).max())

    # ------------------------------------------------------------------

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "exterior": self.exterior.tolist(),
            "holes": [hole.tolist() for hole in self.holes],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "Workspace":
        if "exterior" not in data:
            raise WorkspaceError("workspace document has no 'exterior' ring")
        return cls(
            exterior=data["exterior"],
            holes=list(data.get("holes", [])),
            name=str(data.get("name", "workspace")),
        )


def load_workspace(path: Union[str, Path]) -> Workspace:
    """Read a workspace JSON document"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise WorkspaceError(f"{path}: invalid JSON ({exc})") from exc
    workspace = Workspace.from_dict(data)
    logger.info("Loaded workspace '%s' (%d holes, area %.4f)", workspace.name, len(workspace.holes), workspace.area)
    return workspace


def save_workspace(workspace: Workspace, path: Union[str, Path]):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(workspace.to_dict(), f, indent=2)


def workspace_diameter(workspace: Workspace) -> float:
    return workspace.diameter()
