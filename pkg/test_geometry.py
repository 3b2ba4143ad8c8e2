"""
Tests for workspaces, the distance field and layered isolines
"""

import itertools
import math

import numpy as np
import pytest
from scipy.spatial.distance import cdist

from mcfs.exceptions import NoCoverableLayersError, WorkspaceError
from mcfs.geometry import (
    BENCHMARK_SUITE,
    Workspace,
    build_distance_field,
    create_annulus_workspace,
    create_benchmark_workspace,
    create_disc_workspace,
    create_strip_workspace,
    extract_isolines,
    load_workspace,
    resample_equidistant,
    save_workspace,
    workspace_diameter,
)
from mcfs.geometry.isolines import Isoline
from mcfs.geometry.shapes import circle_ring, create_two_lobed_blob, ellipse_ring


def _radii(iso, center=(0.0, 0.0)):
    return np.linalg.norm(iso.points - np.asarray(center), axis=1)


# -- workspace ---------------------------------------------------------


def test_workspace_orientation_is_normalized():
    square_cw = [[0, 0], [0, 1], [1, 1], [1, 0], [0, 0]]
    hole_ccw = [[0.4, 0.4], [0.6, 0.4], [0.6, 0.6], [0.4, 0.6]]
    ws = Workspace(exterior=square_cw, holes=[hole_ccw])

    assert len(ws.exterior) == 4, "closing duplicate should be dropped"
    x, y = ws.exterior[:, 0], ws.exterior[:, 1]
    assert np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y) > 0, "exterior must be counterclockwise"
    hx, hy = ws.holes[0][:, 0], ws.holes[0][:, 1]
    assert np.dot(hx, np.roll(hy, -1)) - np.dot(np.roll(hx, -1), hy) < 0, "holes must be clockwise"
    assert ws.area == pytest.approx(1.0 - 0.04)


@pytest.mark.parametrize("exterior, holes", [
    ([[0, 0], [1, 0], [2, 0]], []),                                  # collinear
    ([[0, 0], [1, 1], [1, 0], [0, 1]], []),                          # bow tie
    ([[0, 0], [1, 0], [1, 1], [0, 1]], [[[2, 2], [3, 2], [3, 3]]]),  # hole outside
    ([[0, 0], [4, 0], [4, 4], [0, 4]],
     [[[1, 1], [2, 1], [2, 2], [1, 2]], [[1.5, 1.5], [2.5, 1.5], [2.5, 2.5], [1.5, 2.5]]]),  # overlapping holes
])
def test_degenerate_workspaces_are_rejected(exterior, holes):
    with pytest.raises(WorkspaceError):
        Workspace(exterior=exterior, holes=holes)


def test_workspace_json_roundtrip(tmp_path):
    ws = create_benchmark_workspace("office")
    path = tmp_path / "office.json"
    save_workspace(ws, path)
    loaded = load_workspace(path)
    assert loaded.name == "office"
    assert len(loaded.holes) == 2
    assert loaded.area == pytest.approx(ws.area)


def test_office_boundary_band_is_small():
    ws = create_benchmark_workspace("office")
    l = ws.diameter() / 40.0
    assert ws.area == pytest.approx(95.0)
    # cells within l/2 of a wall or desk lie more than l/2 from the first isoline
    band = ws.polygon.length * (l / 2.0) / ws.area
    assert band < 0.09, f"boundary band takes {band:.1%} of the office"


def test_invalid_workspace_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    with pytest.raises(WorkspaceError):
        load_workspace(path)


def test_disc_diameter():
    assert workspace_diameter(create_disc_workspace(1.0)) == pytest.approx(2.0, abs=1e-9)


# -- distance field ----------------------------------------------------


def test_distance_field_matches_disc_distance():
    ws = create_disc_workspace(1.0)
    df = build_distance_field(ws, 0.05)
    gx, gy = np.meshgrid(df.xs, df.ys)
    r = np.hypot(gx, gy)
    inside = df.mask & (r < 0.99)
    error = np.abs(df.values[inside] - (1.0 - r[inside]))
    assert error.max() <= 0.05, f"distance error {error.max():.4f} exceeds the cell size"
    assert np.all(df.values[~df.mask] <= 0.0), "outside values must be non-positive"
    assert df.l_max == pytest.approx(1.0, abs=0.05)


def test_distance_field_rejects_bad_cell_size():
    with pytest.raises(WorkspaceError):
        build_distance_field(create_disc_workspace(), 0.0)


# -- isolines ----------------------------------------------------------


def test_annulus_isolines():
    print("\n" + "=" * 70)
    print("ANNULUS ISOLINES (outer 2, hole 1, l=0.2)")
    print("=" * 70)
    ws = create_annulus_workspace(outer=2.0, inner=1.0)
    isolines = extract_isolines(build_distance_field(ws, 0.05), 0.2)
    for iso in isolines:
        print(f"  layer {iso.layer}: {len(iso)} points, mean radius {_radii(iso).mean():.4f}")

    assert len(isolines) == 4, f"expected 4 isolines, got {len(isolines)}"
    expected = [(1, 1.8), (1, 1.2), (2, 1.6), (2, 1.4)]
    for iso, (layer, radius) in zip(isolines, expected):
        assert iso.layer == layer
        assert np.all(np.abs(_radii(iso) - radius) <= 0.05), f"layer {layer} circle should have radius {radius}"


def test_disc_isoline_radii():
    ws = create_disc_workspace(1.0)
    l = 0.1
    isolines = extract_isolines(build_distance_field(ws, l / 4), l)
    assert len(isolines) == 9
    for iso in isolines:
        expected = 1.0 - iso.layer * l
        assert np.all(np.abs(_radii(iso) - expected) <= 0.05), f"layer {iso.layer} radius off"


def test_disc_isolines_at_coarse_step():
    ws = create_disc_workspace(1.0)
    isolines = extract_isolines(build_distance_field(ws, 0.075), 0.3)
    assert [len(iso) for iso in isolines] == [15, 8, 3], "three nested circles of 15, 8 and 3 points"
    for iso in isolines:
        assert iso.area > 0, "isolines run counterclockwise"


def test_resample_circle_point_count():
    raw = Isoline(layer=1, points=circle_ring(0.7, n=512), spacing=0.0)
    iso = resample_equidistant(raw, 0.1)
    assert len(iso) == 44, f"round(2*pi*0.7/0.1) = 44, got {len(iso)}"
    assert iso.spacing == pytest.approx(0.09996, abs=1e-3)
    # first point is the lexicographically smallest vertex
    assert iso.points[0, 0] == pytest.approx(-0.7, abs=1e-3)
    gaps = np.linalg.norm(np.roll(iso.points, -1, axis=0) - iso.points, axis=1)
    assert np.all(np.abs(gaps - gaps.mean()) <= 0.01 * gaps.mean()), "spacing must be uniform"


@pytest.mark.parametrize("ring, l", [
    (circle_ring(0.7, n=512), 0.1),
    (ellipse_ring(2.0, 1.5, n=512), 0.2),
])
def test_resample_is_idempotent(ring, l):
    once = resample_equidistant(Isoline(layer=1, points=ring, spacing=0.0), l)
    twice = resample_equidistant(once, l)
    assert len(twice) == len(once)
    assert twice.spacing == pytest.approx(once.spacing, rel=2e-3)
    assert np.allclose(twice.points[0], once.points[0]), "start point is kept"
    gaps = np.linalg.norm(np.roll(twice.points, -1, axis=0) - twice.points, axis=1)
    assert np.all(np.abs(gaps - twice.spacing) <= 0.01 * twice.spacing)


@pytest.mark.parametrize("radius", [1.0, 2.0])
def test_disc_isoline_count_shrinks_with_step(radius):
    ws = create_disc_workspace(radius)
    steps = [radius * f for f in (0.05, 0.1, 0.15, 0.2, 0.3, 0.5)]
    counts = [len(extract_isolines(build_distance_field(ws, l / 4), l)) for l in steps]
    print(f"\n  disc r={radius}: isoline counts {counts}")
    assert all(a >= b for a, b in zip(counts, counts[1:])), f"counts must not grow with l: {counts}"
    assert counts[0] > counts[-1]


@pytest.mark.parametrize("factory, l", [
    (lambda: create_annulus_workspace(outer=2.0, inner=1.0), 0.2),
    (create_two_lobed_blob, 0.09),
])
def test_same_layer_isolines_are_disjoint(factory, l):
    isolines = extract_isolines(build_distance_field(factory(), l / 4), l)
    by_layer = {}
    for iso in isolines:
        by_layer.setdefault(iso.layer, []).append(iso)
    assert any(len(group) >= 2 for group in by_layer.values()), "some layer holds several isolines"
    for layer, group in by_layer.items():
        for a, b in itertools.combinations(group, 2):
            gap = float(cdist(a.points, b.points).min())
            assert gap > l / 2, f"layer {layer}: isolines {gap:.4f} apart"


def test_thin_strip_has_no_layers():
    ws = create_strip_workspace(3.0, 0.1)
    with pytest.raises(NoCoverableLayersError):
        extract_isolines(build_distance_field(ws, 0.05), 0.2)


@pytest.mark.parametrize("name", sorted(BENCHMARK_SUITE))
def test_isoline_offsets_on_suite(name):
    ws = create_benchmark_workspace(name)
    l = ws.diameter() / 40.0
    isolines = extract_isolines(build_distance_field(ws, l / 4), l)
    assert isolines, f"{name}: no isolines"
    worst = 0.0
    for iso in isolines:
        deviation = np.abs(ws.distance_to_boundary(iso.points) - iso.layer * l)
        worst = max(worst, float(deviation.max()))
    print(f"\n  {name}: {len(isolines)} isolines, worst offset error {worst / l:.3f} l")
    assert worst <= 0.25 * l, f"{name}: isoline offset error {worst:.4f} > l/4"


def test_isolines_stay_inside():
    ws = create_benchmark_workspace("blob_two_obstacles")
    l = ws.diameter() / 40.0
    for iso in extract_isolines(build_distance_field(ws, l / 4), l):
        assert ws.contains(iso.points).all()
        assert not math.isnan(iso.perimeter)
