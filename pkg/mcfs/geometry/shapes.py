"""
Benchmark workspace analogues

Factory functions for the shapes used in tests and examples: a disc, an
annulus, a square, a two-lobed blob, a blob with two obstacles, an L-shaped
office (a square room with one corner cut out) with two desks and a
torus-like double-hole blob.
"""

from typing import Callable, Dict, Tuple

import numpy as np
from shapely.geometry import Point
from shapely.ops import unary_union

from .workspace import Workspace


def circle_ring(
    radius: float,
    center: Tuple[float, float] = (0.0, 0.0),
    n: int = 256,
    clockwise: bool = False
) -> np.ndarray:
    """Regular n-gon approximating a circle"""
    angles = 2.0 * np.pi * np.arange(n) / n
    ring = np.column_stack([center[0] + radius * np.cos(angles), center[1] + radius * np.sin(angles)])
    return ring[::-1].copy() if clockwise else ring


def ellipse_ring(a: float, b: float, center: Tuple[float, float] = (0.0, 0.0), n: int = 256) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([center[0] + a * np.cos(angles), center[1] + b * np.sin(angles)])


def rectangle_ring(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def create_disc_workspace(radius: float = 1.0, center: Tuple[float, float] = (0.0, 0.0), n: int = 256) -> Workspace:
    return Workspace(exterior=circle_ring(radius, center, n), name="disc")


def create_square_workspace(side: float = 2.0) -> Workspace:
    h = side / 2.0
    return Workspace(exterior=rectangle_ring(-h, -h, h, h), name="square")


def create_strip_workspace(length: float, width: float) -> Workspace:
    return Workspace(exterior=rectangle_ring(0.0, 0.0, length, width), name="strip")


def create_annulus_workspace(
    outer: float = 2.0,
    inner: float = 1.0,
    offset: Tuple[float, float] = (0.0, 0.0),
    n: int = 256
) -> Workspace:
    """Disc with one circular hole; ``offset`` moves the hole off-centre"""
    return Workspace(
        exterior=circle_ring(outer, n=n),
        holes=[circle_ring(inner, offset, n, clockwise=True)],
        name="annulus",
    )


def create_two_lobed_blob(radius: float = 1.0, separation: float = 1.6) -> Workspace:
    """Union of two discs whose centres lie ``separation`` apart on the x axis"""
    half = separation / 2.0
    shape = unary_union([
        Point(-half, 0.0).buffer(radius, quad_segs=64),
        Point(half, 0.0).buffer(radius, quad_segs=64),
    ])
    return Workspace(exterior=np.asarray(shape.exterior.coords), name="two_lobed_blob")


def create_blob_with_two_obstacles() -> Workspace:
    return Workspace(
        exterior=ellipse_ring(2.0, 1.5),
        holes=[
            circle_ring(0.3, (-0.8, 0.2), 96, clockwise=True),
            circle_ring(0.3, (0.7, -0.3), 96, clockwise=True),
        ],
        name="blob_two_obstacles",
    )


def create_office_workspace() -> Workspace:
    """
    10 x 10 room with a 2 x 2 corner cut out and two 1 x 0.5 desks

    The desks keep a clearance of 3 to the nearest walls and to each other.
    """
    exterior = np.array([[0, 0], [10, 0], [10, 8], [8, 8], [8, 10], [0, 10]], dtype=float)
    return Workspace(
        exterior=exterior,
        holes=[
            rectangle_ring(3.0, 3.0, 4.0, 3.5),
            rectangle_ring(3.0, 6.5, 4.0, 7.0),
        ],
        name="office",
    )


def create_double_hole_blob() -> Workspace:
    """Torus-like blob: an ellipse with two off-centre holes"""
    return Workspace(
        exterior=ellipse_ring(2.5, 1.6),
        holes=[
            circle_ring(0.45, (-1.1, 0.15), 96, clockwise=True),
            circle_ring(0.45, (1.0, -0.1), 96, clockwise=True),
        ],
        name="double_hole_blob",
    )


def _suite_annulus() -> Workspace:
    return create_annulus_workspace(outer=2.0, inner=0.6, offset=(0.4, 0.0))


BENCHMARK_SUITE: Dict[str, Callable[[], Workspace]] = {
    "disc": create_disc_workspace,
    "annulus": _suite_annulus,
    "two_lobed_blob": create_two_lobed_blob,
    "blob_two_obstacles": create_blob_with_two_obstacles,
    "office": create_office_workspace,
    "double_hole_blob": create_double_hole_blob,
}


def create_benchmark_workspace(name: str) -> Workspace:
    if name not in BENCHMARK_SUITE:
        raise ValueError(f"Unknown benchmark workspace '{name}'. Choose from {sorted(BENCHMARK_SUITE)}")
    return BENCHMARK_SUITE[name]()


def random_blob(rng: np.random.Generator, n: int = 128, base: float = 1.0, wobble: float = 0.2) -> Workspace:
    """Star-shaped blob with a smooth random radius profile"""
    angles = 2.0 * np.pi * np.arange(n) / n
    radius = np.full(n, base)
    for harmonic in (2, 3):
        amplitude = rng.uniform(0.0, wobble / harmonic)
        phase = rng.uniform(0.0, 2.0 * np.pi)
        radius += amplitude * np.cos(harmonic * angles + phase)
    ring = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    return Workspace(exterior=ring, name="random_blob")

