"""
Layered isolines: marching-squares contours of the distance field

Layer i is the level set at distance i*l from the boundary. Contours are
traced with contourpy's serial marching-squares kernel (linear interpolation
on cell edges; saddle quads are resolved with the quad-centre value, the mean
of the four corners) and then resampled to equidistant points.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import contourpy
import numpy as np

from ..exceptions import NoCoverableLayersError
from .distance_field import DistanceField
from .workspace import open_ring, ring_perimeter, signed_area

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class Isoline:
    """Closed counterclockwise point loop at offset ``layer * l``"""

    layer: int
    points: np.ndarray              # (N, 2), open loop
    spacing: float                  # arc length between consecutive points

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or len(self.points) < 3:
            raise ValueError(f"isoline needs at least 3 points, got {len(self.points)}")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def perimeter(self) -> float:
        return ring_perimeter(self.points)

    @property
    def area(self) -> float:
        return signed_area(self.points)

    @property
    def centroid(self) -> np.ndarray:
        return self.points.mean(axis=0)

    def predecessor(self, index: int) -> int:
        """B(p): the point before ``index`` in counterclockwise order"""
        return (index - 1) % len(self.points)

    def successor(self, index: int) -> int:
        return (index + 1) % len(self.points)


def resample_equidistant(iso: Isoline, l: float) -> Isoline:
    """
    Resample a closed loop into N = max(3, round(P/l)) points spaced P/N apart

    The loop is made counterclockwise and the first sample is placed on the
    lexicographically smallest vertex (smallest x, then smallest y), so the
    result does not depend on where the tracer started the contour.
    """
    ring = open_ring(iso.points)
    if signed_area(ring) < 0:
        ring = ring[::-1]
    start = int(np.lexsort((ring[:, 1], ring[:, 0]))[0])
    ring = np.roll(ring, -start, axis=0)

    closed = np.vstack([ring, ring[:1]])
    seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    perimeter = float(arc[-1])

    n = max(3, int(math.floor(perimeter / l + 0.5)))
    spacing = perimeter / n
    s = np.arange(n) * spacing
    points = np.column_stack([
        np.interp(s, arc, closed[:, 0]),
        np.interp(s, arc, closed[:, 1]),
    ])
    return Isoline(layer=iso.layer, points=points, spacing=spacing)


def count_layers(df: DistanceField, l: float) -> int:
    return int(math.floor(df.l_max / l + 1e-9))


def extract_isolines(df: DistanceField, l: float, min_area: Optional[float] = None) -> List[Isoline]:
    """
    Trace and resample every closed contour at levels l, 2l, ..., floor(l_max/l)*l

    Args:
        df: Signed distance field of the workspace
        l: Isoline step (cover diameter)
        min_area: Contours enclosing no more than this are dropped
            (default (l/2)^2)

    Returns:
        Isolines sorted by layer, then by first point
    """
    if not l > 0:
        raise ValueError(f"isoline step must be positive, got {l}")
    n_layers = count_layers(df, l)
    if n_layers == 0:
        raise NoCoverableLayersError(
            f"no coverable layers: l_max={df.l_max:.4f} is below the step l={l}"
        )
    if min_area is None:
        min_area = (l / 2.0) ** 2

    generator = contourpy.contour_generator(
        x=df.xs, y=df.ys, z=df.values,
        name="serial", line_type=contourpy.LineType.Separate,
    )

    isolines = []
    for layer in range(1, n_layers + 1):
        level = layer * l
        for line in generator.lines(level):
            line = np.asarray(line, dtype=float)
            if len(line) < 4 or not np.allclose(line[0], line[-1]):
                logger.debug("Layer %d: skipping open contour with %d vertices", layer, len(line))
                continue
            ring = line[:-1]
            if abs(signed_area(ring)) <= min_area:
                continue
            perimeter = ring_perimeter(ring)
            if perimeter < 1.5 * l:
                continue
            raw = Isoline(layer=layer, points=ring, spacing=perimeter / len(ring))
            isolines.append(resample_equidistant(raw, l))

    if not isolines:
        raise NoCoverableLayersError(f"no coverable layers: every contour at step l={l} was degenerate")
    isolines.sort(key=lambda iso: (iso.layer, float(iso.points[0, 0]), float(iso.points[0, 1])))
    logger.info("Extracted %d isolines over %d layers (l=%.4g)", len(isolines), n_layers, l)
    return isolines
