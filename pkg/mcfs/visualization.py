"""
SVG rendering of workspaces, isographs and coverage paths
"""

import logging
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.patches import PathPatch
from matplotlib.path import Path as MplPath

from .cfs.stitching import CoveragePath
from .geometry.workspace import Workspace
from .isograph.graph import Isograph

logger = logging.getLogger(__name__)

ROBOT_COLORS = plt.get_cmap("tab10").colors


def _workspace_patch(ws: Workspace) -> PathPatch:
    vertices, codes = [], []
    for ring in ws.rings:
        closed = np.vstack([ring, ring[:1]])
        vertices.extend(closed.tolist())
        codes.extend([MplPath.MOVETO] + [MplPath.LINETO] * (len(ring) - 1) + [MplPath.CLOSEPOLY])
    return PathPatch(MplPath(vertices, codes), facecolor="#eef2f5", edgecolor="#333333", linewidth=1.0)


def plot_plan(
    ws: Workspace,
    paths: Sequence[CoveragePath] = (),
    graph: Optional[Isograph] = None,
    ax=None,
    title: Optional[str] = None
):
    """Draw the workspace, optional isograph overlay and per-robot paths"""
    if ax is None:
        _, ax = plt.subplots(figsize=(8, 8))

    ax.add_patch(_workspace_patch(ws))
    for hole in ws.holes:
        ax.fill(hole[:, 0], hole[:, 1], color="#9aa5b1", zorder=1)

    if graph is not None:
        for vx in graph.vertices:
            ring = np.vstack([vx.points, vx.points[:1]])
            ax.plot(ring[:, 0], ring[:, 1], color="#c0c8d0", linewidth=0.5, zorder=2)
        for edge in graph.edges:
            a, b = graph.centroid(edge.u), graph.centroid(edge.v)
            style = "--" if edge.kind in ("augmented", "nonadjacent") else "-"
            ax.plot([a[0], b[0]], [a[1], b[1]], style, color="#7b8794", linewidth=0.8, zorder=3)
        centroids = np.array([graph.centroid(v) for v in graph.vertex_ids])
        sizes = np.array([graph.weight(v) for v in graph.vertex_ids], dtype=float)
        ax.scatter(centroids[:, 0], centroids[:, 1], s=sizes, color="#52606d", zorder=4)

    for path in paths:
        color = ROBOT_COLORS[path.robot % len(ROBOT_COLORS)]
        pts = np.vstack([path.points, path.points[:1]]) if path.closed else path.points
        ax.plot(pts[:, 0], pts[:, 1], "-", color=color, linewidth=1.2, label=f"Robot {path.robot}", zorder=5)
        ax.plot(path.points[0, 0], path.points[0, 1], "s", color=color, markersize=7, zorder=6)

    x0, y0, x1, y1 = ws.bounds
    pad = 0.05 * max(x1 - x0, y1 - y0)
    ax.set_xlim(x0 - pad, x1 + pad)
    ax.set_ylim(y0 - pad, y1 + pad)
    ax.set_aspect("equal", adjustable="box")
    if title:
        ax.set_title(title, fontsize=14)
    if paths:
        ax.legend(loc="upper right", fontsize=8)
    return ax


def render_svg(
    ws: Workspace,
    paths: Sequence[CoveragePath],
    out,
    graph: Optional[Isograph] = None,
    title: Optional[str] = None
) -> Path:
    """
    Write a byte-reproducible SVG

    Raises:
        OSError: the output location is not writable
    """
    out = Path(out)
    with plt.rc_context({"svg.hashsalt": "mcfs", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(8, 8))
        try:
            plot_plan(ws, paths, graph, ax=ax, title=title)
            fig.tight_layout()
            fig.savefig(out, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)
    logger.info("Wrote %s", out)
    return out
