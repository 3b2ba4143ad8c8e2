"""
Basic MCFS Coverage Example

Plans one connected Fermat spiral over the unit disc and writes the path,
report and SVG to output/
"""

import sys
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from mcfs import MCFSPlanner, create_default_config
from mcfs.analysis import generate_report, save_paths_json
from mcfs.geometry import create_disc_workspace
from mcfs.visualization import render_svg


def main():
    """Run a single-robot plan on the unit disc"""

    print("=" * 70)
    print("MCFS COVERAGE - Basic Example")
    print("Single robot, unit disc")
    print("=" * 70)
    print()

    workspace = create_disc_workspace(1.0)
    config = create_default_config(l=0.1, robots=[(0.9, 0.0)], variant="none")

    print("Configuration:")
    print(f"  Isoline step l: {config.l}")
    print(f"  Robots: {config.k}")
    print(f"  Selector: {config.selector}")
    print()

    planner = MCFSPlanner(workspace, config)
    result = planner.run()

    print(f"Isolines: {len(result.isolines)}")
    print(f"Isovertices: {len(result.graph.vertices)}, edges: {len(result.graph.edges)}")
    print()
    print(generate_report(result.report))

    output = Path("output")
    output.mkdir(exist_ok=True)
    save_paths_json(result.paths, output / "disc_paths.json")
    result.report.save(output / "disc_report.json")
    render_svg(workspace, result.paths, output / "disc_plan.svg", graph=result.graph, title="Unit disc, 1 robot")

    print("\nSaved output/disc_paths.json, output/disc_report.json, output/disc_plan.svg")


if __name__ == "__main__":
    main()
