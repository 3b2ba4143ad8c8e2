"""
Signed distance field of a workspace on a regular grid

Grid point (i, j) sits at (origin.x + j*cell_size, origin.y + i*cell_size):
rows follow y, columns follow x, which is the (ny, nx) layout contourpy
expects for its ``z`` array.
"""

import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import WorkspaceError
from .workspace import Point2, Workspace

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class DistanceField:
    """Signed distances (positive inside) sampled on a padded grid"""

    origin: Point2
    cell_size: float
    values: np.ndarray          # (ny, nx) signed distance
    mask: np.ndarray            # (ny, nx) True inside the workspace

    @property
    def shape(self):
        return self.values.shape

    @property
    def xs(self) -> np.ndarray:
        return self.origin.x + np.arange(self.values.shape[1]) * self.cell_size

    @property
    def ys(self) -> np.ndarray:
        return self.origin.y + np.arange(self.values.shape[0]) * self.cell_size

    @property
    def l_max(self) -> float:
        """Largest distance to the boundary over inside grid points"""
        if not np.any(self.mask):
            return 0.0
        return float(self.values[self.mask].max())

    def value_at(self, point) -> float:
        """Bilinear interpolation of the field at an arbitrary point"""
        x, y = point
        fx = (x - self.origin.x) / self.cell_size
        fy = (y - self.origin.y) / self.cell_size
        ny, nx = self.values.shape
        j = int(np.clip(np.floor(fx), 0, nx - 2))
        i = int(np.clip(np.floor(fy), 0, ny - 2))
        tx = float(np.clip(fx - j, 0.0, 1.0))
        ty = float(np.clip(fy - i, 0.0, 1.0))
        v = self.values
        bottom = v[i, j] * (1 - tx) + v[i, j + 1] * tx
        top = v[i + 1, j] * (1 - tx) + v[i + 1, j + 1] * tx
        return float(bottom * (1 - ty) + top * ty)


def build_distance_field(ws: Workspace, cell_size: float) -> DistanceField:
    """
    Sample the exact signed distance to the workspace boundary

    The grid covers the workspace bounding box padded by one cell on every
    side, so every contour at a positive level closes inside the grid.

    Args:
        ws: Validated workspace
        cell_size: Grid spacing (workspace units)

    Returns:
        DistanceField with positive values inside, negative outside
    """
    if not cell_size > 0:
        raise WorkspaceError(f"cell_size must be positive, got {cell_size}")
    if ws.area <= 0:
        raise WorkspaceError(f"degenerate workspace '{ws.name}': zero area")

    x_min, y_min, x_max, y_max = ws.bounds
    x0 = x_min - cell_size
    y0 = y_min - cell_size
    nx = int(np.ceil((x_max + cell_size - x0) / cell_size)) + 1
    ny = int(np.ceil((y_max + cell_size - y0) / cell_size)) + 1

    xs = x0 + np.arange(nx) * cell_size
    ys = y0 + np.arange(ny) * cell_size
    gx, gy = np.meshgrid(xs, ys)
    points = np.column_stack([gx.ravel(), gy.ravel()])

    distance = ws.distance_to_boundary(points).reshape(ny, nx)
    mask = ws.contains(points).reshape(ny, nx)
    values = np.where(mask, distance, -distance)

    field = DistanceField(origin=Point2(x0, y0), cell_size=float(cell_size), values=values, mask=mask)
    logger.debug("Distance field %dx%d (cell %.4g), l_max=%.4f", ny, nx, cell_size, field.l_max)
    return field
