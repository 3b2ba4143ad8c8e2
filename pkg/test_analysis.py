"""
Tests for coverage metrics, reports, path export and SVG rendering
"""

import json

import numpy as np
import pandas as pd
import pytest

from mcfs.analysis import (
    compute_metrics,
    export_paths_csv,
    generate_report,
    load_paths_json,
    save_paths_json,
)
from mcfs.cfs import CoveragePath
from mcfs.config import PlanConfig
from mcfs.geometry import create_disc_workspace, create_strip_workspace
from mcfs.geometry.shapes import circle_ring
from mcfs.visualization import render_svg

L = 0.2


def _cfg(l=L, k=1):
    return PlanConfig(l=l, robots=[(0.0, 0.0)] * k, enable_augment=False, enable_refine=False)


def _segment_path(robot=0):
    xs = np.linspace(0.0, 10 * L, 21)
    return CoveragePath(robot, np.column_stack([xs, np.full_like(xs, L / 2)]), [], closed=False)


def _ring_path(robot, radius, n=40):
    points = circle_ring(radius, n=n)
    return CoveragePath(robot, points, [(0, i) for i in range(n)], closed=True)


# -- metrics -----------------------------------------------------------


def test_straight_pass_covers_strip():
    ws = create_strip_workspace(10 * L, L)
    report = compute_metrics([_segment_path()], ws, _cfg())
    assert report.coverage_ratio == pytest.approx(1.0, abs=0.05)
    assert report.overlap_ratio == 0.0
    assert report.makespan == pytest.approx(10 * L)
    assert report.curvature == pytest.approx(0.0, abs=1e-12)
    assert report.per_robot[0]["points"] == 21


def test_coincident_paths_overlap_everything_they_cover():
    ws = create_strip_workspace(10 * L, L)
    report = compute_metrics([_segment_path(0), _segment_path(1)], ws, _cfg(k=2))
    assert report.overlap_ratio == report.coverage_ratio
    assert report.coverage_ratio > 0.9


def test_concentric_rings_cover_disc():
    print("\n" + "=" * 70)
    print("CONCENTRIC RINGS ON THE UNIT DISC (l=0.1)")
    print("=" * 70)
    ws = create_disc_workspace(1.0)
    l = 0.1
    paths = [_ring_path(0, 1.0 - j * l, n=max(6, int(round(2 * np.pi * (1.0 - j * l) / l))))
             for j in range(1, 10)]
    report = compute_metrics(paths, ws, _cfg(l=l))
    print(f"  coverage {report.coverage_ratio:.2%}, overlap {report.overlap_ratio:.2%}")
    # cells within l/2 of the boundary are out of reach of the first ring
    assert report.coverage_ratio >= 0.85
    assert 0.0 <= report.overlap_ratio <= report.coverage_ratio


def test_self_revisit_counts_as_overlap():
    ws = create_strip_workspace(10 * L, L)
    xs = np.linspace(0.0, 10 * L, 21)
    there = np.column_stack([xs, np.full_like(xs, L / 2)])
    back_and_forth = CoveragePath(0, np.vstack([there, there[::-1][1:]]), [], closed=False)
    report = compute_metrics([back_and_forth], ws, _cfg())
    assert report.overlap_ratio > 0.5, "the return pass re-covers cells far along the path"


def test_report_text_and_json(tmp_path):
    ws = create_strip_workspace(10 * L, L)
    report = compute_metrics([_segment_path()], ws, _cfg(), timings={"geom": 0.5}, info={"variant": "none"})
    text = generate_report(report, save_path=tmp_path / "report.txt")
    assert "Coverage ratio: 100.00%" in text
    assert "variant: none" in text
    assert (tmp_path / "report.txt").read_text(encoding="utf-8") == text

    data = json.loads(report.to_json())
    assert data["runtime"] == {"geom": 0.5}
    assert "runtime" not in report.to_dict(timings=False)
    assert data["point_makespan"] == 21


# -- export ------------------------------------------------------------


def test_paths_csv_and_json(tmp_path):
    paths = [_ring_path(0, 0.5, 12), _ring_path(1, 0.3, 8)]
    csv_path = tmp_path / "paths.csv"
    export_paths_csv(paths, csv_path)
    frame = pd.read_csv(csv_path)
    assert list(frame.columns) == ["robot", "seq", "x", "y", "vertex", "index"]
    assert frame.groupby("robot").size().tolist() == [12, 8]

    json_path = tmp_path / "paths.json"
    save_paths_json(paths, json_path)
    loaded = load_paths_json(json_path)
    assert [p.robot for p in loaded] == [0, 1]
    assert np.allclose(loaded[1].points, paths[1].points)
    assert loaded[0].sources == paths[0].sources


# -- rendering ---------------------------------------------------------


def test_render_workspace_only(tmp_path):
    out = render_svg(create_disc_workspace(1.0), [], tmp_path / "empty.svg")
    assert out.read_text(encoding="utf-8").lstrip().startswith("<?xml")


def test_render_two_robots_is_reproducible(tmp_path):
    ws = create_disc_workspace(1.0)
    paths = [_ring_path(0, 0.8), _ring_path(1, 0.4)]
    a = render_svg(ws, paths, tmp_path / "a.svg", title="two robots")
    b = render_svg(ws, paths, tmp_path / "b.svg", title="two robots")
    svg = a.read_text(encoding="utf-8")
    assert "#1f77b4" in svg and "#ff7f0e" in svg, "each robot gets its own stroke color"
    assert a.read_bytes() == b.read_bytes()


def test_render_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        render_svg(create_disc_workspace(1.0), [], tmp_path / "missing" / "plan.svg")
