"""
End-to-end planner tests: point conservation, selector ordering, shared
roots, coverage on the benchmark suite and error reporting
"""

from collections import Counter

import numpy as np
import pytest

from mcfs import MCFSPlanner, plan
from mcfs.cfs import Selector, mean_curvature, stitch_all
from mcfs.config import RefineConfig, SolverConfig, create_default_config
from mcfs.exceptions import InfeasibleInstanceError, NoCoverableLayersError
from mcfs.geometry import (
    BENCHMARK_SUITE,
    build_distance_field,
    create_annulus_workspace,
    create_benchmark_workspace,
    create_disc_workspace,
    create_strip_workspace,
    extract_isolines,
)
from mcfs.geometry.shapes import random_blob
from mcfs.isograph import build_isograph
from mcfs.planner import snap_roots

# coverage floor at l = D/40 on every suite workspace
COVERAGE_FLOOR = 0.85


def _tree_points(cover, tree):
    counts = Counter()
    for vid in tree.vertices:
        counts.update(cover.graph.vertex(vid).source_list())
    return counts


# -- conservation ------------------------------------------------------


def test_path_length_equals_tree_weight_on_random_blobs():
    print("\n" + "=" * 70)
    print("POINT CONSERVATION ON RANDOM BLOBS (no augmentation)")
    print("=" * 70)
    for seed in range(20):
        ws = random_blob(np.random.default_rng(seed))
        l = ws.diameter() / 20.0
        cfg = create_default_config(l, [(0.5, 0.0), (-0.5, 0.0)], variant="none", bridge=True)
        result = MCFSPlanner(ws, cfg).run()
        cover = result.cover
        for i, (tree, path) in enumerate(zip(cover.trees, result.paths)):
            weight = sum(cover.graph.weight(v) for v in tree.vertices)
            assert len(path) == weight, f"seed {seed} robot {i}: {len(path)} points, tree weight {weight}"
            assert Counter(path.sources) == _tree_points(cover, tree)
            assert path.max_gap <= 2.5 * l, f"seed {seed} robot {i}: gap {path.max_gap / l:.2f} l"
            assert path.entry_exit_distance <= 2.0 * l
            assert result.report.per_robot[i]["points"] == weight
        print(f"  seed {seed:2d}: {len(cover.graph.vertices)} isovertices, "
              f"points per robot {[len(p) for p in result.paths]}")


def test_snap_roots():
    ws = create_disc_workspace(1.0)
    g = build_isograph(extract_isolines(build_distance_field(ws, 0.025), 0.1), 0.1, ws)
    assert snap_roots(g, [(0.95, 0.0), (0.0, 0.0), (0.0, -0.62)]) == [0, 8, 3]


# -- selectors ---------------------------------------------------------


def test_curvature_aware_stitching_beats_random():
    print("\n" + "=" * 70)
    print("SELECTOR CURVATURE (blob with two obstacles)")
    print("=" * 70)
    ws = create_benchmark_workspace("blob_two_obstacles")
    cfg = create_default_config(ws.diameter() / 25.0, [(0.0, 1.2)], variant="none", bridge=True)
    planner = MCFSPlanner(ws, cfg)
    cover = planner.solve_cover()

    def curvature(selector):
        paths = stitch_all(cover.trees, cover.graph, cfg.robots, selector)
        return mean_curvature(paths[0].points)

    random_mean = float(np.mean([curvature(Selector("random", seed=s)) for s in range(20)]))
    mcs = curvature(Selector("mcs"))
    cfs = curvature(Selector("cfs"))
    print(f"  random {random_mean:.4f}  cfs {cfs:.4f} ({cfs / random_mean:.2f}x)  "
          f"mcs {mcs:.4f} ({mcs / random_mean:.2f}x)")
    assert mcs <= 0.90 * random_mean, f"mcs at {mcs / random_mean:.3f}x random"
    assert cfs <= 0.90 * random_mean, f"cfs at {cfs / random_mean:.3f}x random"


# -- shared roots ------------------------------------------------------


def test_shared_root_improves_with_augmentation_and_refinement():
    print("\n" + "=" * 70)
    print("FOUR ROBOTS, ONE ROOT (disc, l=0.1)")
    print("=" * 70)
    ws = create_disc_workspace(1.0)
    robots = [(0.9, 0.0)] * 4
    reports = {}
    for variant in ("none", "ref", "both"):
        cfg = create_default_config(0.1, robots, variant=variant, solver=SolverConfig(time_limit=20))
        _, report = plan(ws, cfg)
        reports[variant] = report
        print(f"  {variant:5s}: makespan {report.makespan:7.3f} ({report.point_makespan} points), "
              f"overlap {report.overlap_ratio:.2%}")

    none, ref, both = reports["none"], reports["ref"], reports["both"]
    assert both.point_makespan <= none.point_makespan
    assert ref.point_makespan <= none.point_makespan
    assert both.makespan <= 0.7 * none.makespan
    assert both.overlap_ratio <= 0.5 * none.overlap_ratio


# -- suite -------------------------------------------------------------


@pytest.mark.parametrize("variant", ["none", "ref", "aug", "both"])
@pytest.mark.parametrize("name", sorted(BENCHMARK_SUITE))
def test_suite_coverage_and_conservation(name, variant):
    ws = create_benchmark_workspace(name)
    l = ws.diameter() / 40.0
    robots = [tuple(ws.exterior[0]), tuple(ws.exterior[len(ws.exterior) // 2])]
    cfg = create_default_config(
        l, robots, variant=variant, bridge=True,
        solver=SolverConfig(time_limit=10), refine=RefineConfig(budget=256),
    )
    result = MCFSPlanner(ws, cfg).run()
    report = result.report
    print(f"\n  {name}/{variant}: {len(result.isolines)} isolines, coverage {report.coverage_ratio:.2%}, "
          f"overlap {report.overlap_ratio:.2%}, worst gap {max(p.max_gap for p in result.paths) / l:.2f} l")

    for i, (tree, path) in enumerate(zip(result.cover.trees, result.paths)):
        assert Counter(path.sources) == _tree_points(result.cover, tree)
        assert path.max_gap <= 2.5 * l, f"{name}/{variant} robot {i}: gap {path.max_gap / l:.2f} l"
        assert path.entry_exit_distance <= 2.0 * l, \
            f"{name}/{variant} robot {i}: entry-exit {path.entry_exit_distance / l:.2f} l"
    assert 0.0 <= report.overlap_ratio <= report.coverage_ratio <= 1.0
    assert report.coverage_ratio >= COVERAGE_FLOOR, f"{name}/{variant}: coverage {report.coverage_ratio:.3f}"
    if variant == "both":
        assert report.overlap_ratio <= 0.15, f"{name}: overlap {report.overlap_ratio:.3f}"


def test_disc_single_robot_coverage():
    ws = create_disc_workspace(1.0)
    cfg = create_default_config(0.05, [(0.0, 0.0)], variant="none")
    paths, report = plan(ws, cfg)
    assert len(paths) == 1
    assert report.coverage_ratio >= 0.89
    assert report.overlap_ratio <= 0.10


# -- determinism and errors --------------------------------------------


def test_report_is_deterministic():
    ws = create_disc_workspace(1.0)

    def run():
        cfg = create_default_config(0.3, [(0.7, 0.0), (0.7, 0.0)], variant="both", seed=4)
        paths, report = plan(ws, cfg)
        return [p.to_dict() for p in paths], report.to_json(timings=False)

    first, second = run(), run()
    assert first[0] == second[0]
    assert first[1] == second[1]
    assert '"runtime"' not in first[1]


def test_stage_errors_carry_stage():
    strip = create_strip_workspace(3.0, 0.1)
    with pytest.raises(NoCoverableLayersError) as info:
        plan(strip, create_default_config(0.2, [(1.0, 0.05)], variant="none"))
    assert info.value.stage == "geom"

    annulus = create_annulus_workspace(outer=2.0, inner=1.0)
    with pytest.raises(InfeasibleInstanceError) as info:
        plan(annulus, create_default_config(0.2, [(1.8, 0.0)], variant="none"))
    assert info.value.stage == "mmrtc"
    assert str(info.value).startswith("[mmrtc]")
