"""
Shared-Root Ablation

Four robots start from the same spot. Runs the none / ref / aug / both
variants and compares makespan, overlap and curvature.
"""

import argparse
import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import pandas as pd

from mcfs import SolverConfig, create_default_config, plan
from mcfs.config import VARIANTS
from mcfs.geometry import BENCHMARK_SUITE, create_benchmark_workspace
from mcfs.visualization import render_svg


def main():
    parser = argparse.ArgumentParser(description="Ablation of augmentation and refinement")
    parser.add_argument("--workspace", choices=sorted(BENCHMARK_SUITE), default="disc")
    parser.add_argument("--robots", type=int, default=4)
    parser.add_argument("--layers", type=float, default=20.0, help="l = diameter / layers")
    parser.add_argument("--time-limit", type=float, default=30.0)
    args = parser.parse_args()

    workspace = create_benchmark_workspace(args.workspace)
    l = workspace.diameter() / args.layers
    start = tuple(workspace.exterior[0])

    print("=" * 70)
    print(f"SHARED-ROOT ABLATION - {workspace.name}, {args.robots} robots at {start[0]:.2f}, {start[1]:.2f}")
    print("=" * 70)

    output = Path("output")
    output.mkdir(exist_ok=True)
    rows = []
    for variant in VARIANTS:
        config = create_default_config(
            l, [start] * args.robots, variant=variant, bridge=True,
            solver=SolverConfig(time_limit=args.time_limit),
        )
        paths, report = plan(workspace, config)
        rows.append({
            "variant": variant,
            "makespan": report.makespan,
            "points": report.point_makespan,
            "coverage": report.coverage_ratio,
            "overlap": report.overlap_ratio,
            "curvature": report.curvature,
            "solver": report.info.get("solver_status"),
        })
        render_svg(workspace, paths, output / f"ablation_{variant}.svg", title=f"{workspace.name}: {variant}")

    table = pd.DataFrame(rows).set_index("variant")
    print(table.to_string(float_format=lambda v: f"{v:.3f}"))
    table.to_csv(output / "ablation.csv")
    print("\nSaved output/ablation.csv and output/ablation_<variant>.svg")


if __name__ == "__main__":
    main()
