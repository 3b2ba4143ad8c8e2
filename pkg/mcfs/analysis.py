"""
Coverage metrics, run reports and path export
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import shapely
from scipy.spatial import cKDTree

from .cfs.curvature import curvature_profile
from .cfs.stitching import CoveragePath
from .geometry.workspace import Workspace

logger = logging.getLogger(__name__)

FLOAT_DIGITS = 9


def _rounded(value):
    if isinstance(value, float):
        return round(value, FLOAT_DIGITS)
    if isinstance(value, dict):
        return {k: _rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v) for v in value]
    if isinstance(value, np.generic):
        return _rounded(value.item())
    return value


@dataclass
class PlanReport:
    """Metrics of one planning run; lengths in workspace units"""

    makespan: float                         # max geometric path length
    curvature: float                        # mean discrete curvature over all path points
    coverage_ratio: float
    overlap_ratio: float
    per_robot: List[Dict] = field(default_factory=list)
    runtime: Dict[str, float] = field(default_factory=dict)     # seconds per stage
    info: Dict = field(default_factory=dict)                    # solver status, graph sizes, variant

    @property
    def point_makespan(self) -> int:
        return max((r["points"] for r in self.per_robot), default=0)

    def to_dict(self, timings: bool = True) -> Dict:
        data = {
            "makespan": self.makespan,
            "point_makespan": self.point_makespan,
            "curvature": self.curvature,
            "coverage_ratio": self.coverage_ratio,
            "overlap_ratio": self.overlap_ratio,
            "per_robot": self.per_robot,
            "info": self.info,
        }
        if timings:
            data["runtime"] = self.runtime
        return _rounded(data)

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=2)

    def save(self, path, timings: bool = True) -> None:
        Path(path).write_text(self.to_json(timings) + "\n", encoding="utf-8")


def _cell_centers(ws: Workspace, cell: float) -> np.ndarray:
    x0, y0, x1, y1 = ws.bounds
    xs = np.arange(x0 + cell / 2.0, x1, cell)
    ys = np.arange(y0 + cell / 2.0, y1, cell)
    gx, gy = np.meshgrid(xs, ys)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    return centers[ws.contains(centers)]


def _path_line(path: CoveragePath):
    points = path.points
    if path.closed and len(points) > 1:
        points = np.vstack([points, points[:1]])
    if len(points) == 1:
        return shapely.Point(points[0])
    return shapely.LineString(points)


def dense_samples(path: CoveragePath, step: float):
    """Points every ``step`` along the path with their arc-length positions"""
    points = path.points
    if path.closed and len(points) > 1:
        points = np.vstack([points, points[:1]])
    if len(points) < 2:
        return points.copy(), np.zeros(len(points))
    seg = np.linalg.norm(np.diff(points, axis=0), axis=1)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    total = arc[-1]
    s = np.arange(0.0, total, step) if total > 0 else np.zeros(1)
    xs = np.interp(s, arc, points[:, 0])
    ys = np.interp(s, arc, points[:, 1])
    return np.column_stack([xs, ys]), s


def _revisited(path: CoveragePath, centers: np.ndarray, radius: float, separation: float, step: float) -> np.ndarray:
    """Cells reached from two places on the path more than ``separation`` apart in arc length"""
    samples, arc = dense_samples(path, step)
    total = path.length
    flags = np.zeros(len(centers), dtype=bool)
    if len(samples) < 2 or len(centers) == 0:
        return flags
    tree = cKDTree(samples)
    for c, hits in enumerate(tree.query_ball_point(centers, radius)):
        if len(hits) < 2:
            continue
        s = arc[hits]
        gap = np.abs(s[:, None] - s[None, :])
        if path.closed:
            gap = np.minimum(gap, total - gap)
        flags[c] = bool((gap > separation).any())
    return flags


def compute_metrics(
    paths: Sequence[CoveragePath],
    ws: Workspace,
    cfg,
    timings: Optional[Dict[str, float]] = None,
    info: Optional[Dict] = None
) -> PlanReport:
    """
    Rasterized coverage/overlap plus makespan and curvature

    A cell (side cfg.grid cell, default l/4) counts as covered when its center
    lies within l/2 of some path. It counts as overlapped when two robots
    cover it, or one robot reaches it from two path positions more than 2*l
    of arc length apart.
    """
    cell, radius, separation = cfg.grid.resolved(cfg.l)
    centers = _cell_centers(ws, cell)
    n_cells = len(centers)
    cell_points = shapely.points(centers)

    hits = np.zeros(n_cells, dtype=int)
    revisits = np.zeros(n_cells, dtype=bool)
    per_robot = []
    profiles = []
    for path in paths:
        line = _path_line(path)
        shapely.prepare(line)
        covered = shapely.dwithin(line, cell_points, radius) if n_cells else np.zeros(0, dtype=bool)
        hits += covered
        revisits |= covered & _revisited(path, centers, radius, separation, cfg.l / 8.0)
        profile = curvature_profile(path.points, closed=path.closed)
        profiles.append(profile)
        per_robot.append({
            "robot": path.robot,
            "length": path.length,
            "points": len(path),
            "max_gap": path.max_gap,
            "entry_exit_distance": path.entry_exit_distance,
            "curvature": float(profile.mean()) if len(profile) else 0.0,
        })

    covered_cells = int((hits > 0).sum())
    overlap_cells = int(((hits > 1) | revisits).sum())
    all_curvature = np.concatenate(profiles) if profiles else np.zeros(0)
    report = PlanReport(
        makespan=max((p.length for p in paths), default=0.0),
        curvature=float(all_curvature.mean()) if len(all_curvature) else 0.0,
        coverage_ratio=covered_cells / n_cells if n_cells else 0.0,
        overlap_ratio=overlap_cells / n_cells if n_cells else 0.0,
        per_robot=per_robot,
        runtime=dict(timings or {}),
        info=dict(info or {}),
    )
    logger.info(
        "Metrics: makespan %.3f, curvature %.3f, coverage %.2f%%, overlap %.2f%%",
        report.makespan, report.curvature, 100 * report.coverage_ratio, 100 * report.overlap_ratio,
    )
    return report


def generate_report(report: PlanReport, title: str = "MCFS COVERAGE PLAN", save_path: Optional[str] = None) -> str:
    """Human-readable report text"""
    lines = []
    lines.append("=" * 70)
    lines.append(title)
    lines.append("=" * 70)
    lines.append("")

    if report.info:
        lines.append("RUN")
        lines.append("-" * 70)
        for key in sorted(report.info):
            lines.append(f"{key}: {report.info[key]}")
        lines.append("")

    lines.append("METRICS")
    lines.append("-" * 70)
    lines.append(f"Makespan (path length): {report.makespan:.3f}")
    lines.append(f"Makespan (points): {report.point_makespan}")
    lines.append(f"Mean curvature: {report.curvature:.4f}")
    lines.append(f"Coverage ratio: {report.coverage_ratio:.2%}")
    lines.append(f"Overlap ratio: {report.overlap_ratio:.2%}")
    lines.append("")

    lines.append("ROBOTS")
    lines.append("-" * 70)
    for r in report.per_robot:
        lines.append(
            f"Robot {r['robot']}: length {r['length']:.3f}, {r['points']} points, "
            f"max gap {r['max_gap']:.3f}, entry-exit {r['entry_exit_distance']:.3f}"
        )
    lines.append("")

    if report.runtime:
        lines.append("RUNTIME")
        lines.append("-" * 70)
        for stage, seconds in report.runtime.items():
            lines.append(f"{stage}: {seconds:.3f} s")
        lines.append("")

    lines.append("=" * 70)
    text = "\n".join(lines)
    if save_path:
        with open(save_path, "w", encoding="utf-8") as f:
            f.write(text)
    return text


def paths_to_dataframe(paths: Sequence[CoveragePath]) -> pd.DataFrame:
    frames = []
    for path in paths:
        sources = np.asarray(path.sources, dtype=int).reshape(-1, 2) if path.sources else np.full((len(path), 2), -1)
        frames.append(pd.DataFrame({
            "robot": path.robot,
            "seq": np.arange(len(path)),
            "x": path.points[:, 0],
            "y": path.points[:, 1],
            "vertex": sources[:, 0],
            "index": sources[:, 1],
        }))
    if not frames:
        return pd.DataFrame(columns=["robot", "seq", "x", "y", "vertex", "index"])
    return pd.concat(frames, ignore_index=True)


def export_paths_csv(paths: Sequence[CoveragePath], save_path) -> None:
    paths_to_dataframe(paths).to_csv(save_path, index=False)
    logger.info("Exported %d paths to %s", len(paths), save_path)


def save_paths_json(paths: Sequence[CoveragePath], save_path) -> None:
    data = {"paths": [p.to_dict() for p in paths]}
    Path(save_path).write_text(json.dumps(data, sort_keys=True) + "\n", encoding="utf-8")


def load_paths_json(path) -> List[CoveragePath]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = data["paths"] if isinstance(data, dict) else data
    return [CoveragePath.from_dict(entry) for entry in entries]
