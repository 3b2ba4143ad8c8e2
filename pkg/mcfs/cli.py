"""
Command-line interface

    python -m mcfs plan workspace.json --robots 2@0,0 --l 0.1 --variant both
    python -m mcfs isolines workspace.json --l 0.1
    python -m mcfs isograph workspace.json --l 0.1 --out graph.json
    python -m mcfs solve graph.json --roots 0,0 --out cover.json
    python -m mcfs metrics workspace.json paths.json --l 0.1
    python -m mcfs render workspace.json --paths paths.json --out plan.svg

A workspace argument is a JSON file or ``suite:<name>`` for a bundled
benchmark. Exit codes: 0 success, 2 invalid input, 3 infeasible instance.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .analysis import compute_metrics, export_paths_csv, generate_report, load_paths_json, save_paths_json
from .cfs.selectors import SELECTOR_KINDS
from .config import VARIANTS, GridConfig, PlanConfig, RefineConfig, SolverConfig, create_default_config, parse_robots
from .exceptions import ConfigurationError, InfeasibleInstanceError, MCFSError, WorkspaceError
from .geometry.distance_field import build_distance_field
from .geometry.isolines import extract_isolines
from .geometry.shapes import BENCHMARK_SUITE, create_benchmark_workspace
from .geometry.workspace import Workspace, load_workspace
from .isograph.augment import augment
from .isograph.graph import Isograph, build_isograph
from .mmrtc.instance import MmrtcInstance
from .mmrtc.model import build_model
from .mmrtc.solver import solve
from .planner import MCFSPlanner, snap_roots
from .visualization import render_svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3


def _workspace(arg: str) -> Workspace:
    if arg.startswith("suite:"):
        name = arg.split(":", 1)[1]
        if name not in BENCHMARK_SUITE:
            raise WorkspaceError(f"unknown benchmark '{name}'; choose from {sorted(BENCHMARK_SUITE)}")
        return create_benchmark_workspace(name)
    path = Path(arg)
    if not path.is_file():
        raise WorkspaceError(f"workspace file not found: {arg}")
    return load_workspace(path)


def _write_json(data, out: Optional[str]):
    text = json.dumps(data, sort_keys=True, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info("Wrote %s", out)
    else:
        print(text)


def _plan_config(args) -> PlanConfig:
    return create_default_config(
        args.l,
        parse_robots(args.robots),
        variant=args.variant,
        delta=args.delta,
        selector=args.selector,
        window=not args.no_window,
        maximize=args.maximize,
        bridge=args.bridge,
        seed=args.seed,
        cell_size=args.cell_size,
        solver=SolverConfig(args.solver, args.time_limit, args.node_limit),
        refine=RefineConfig(trace_path=args.trace),
    )


# -- subcommands -------------------------------------------------------


def cmd_plan(args) -> int:
    ws = _workspace(args.workspace)
    cfg = _plan_config(args)
    result = MCFSPlanner(ws, cfg, export_lp=args.export_lp).run()
    report = result.report
    if args.out:
        save_paths_json(result.paths, args.out)
    else:
        print(json.dumps({"paths": [p.to_dict() for p in result.paths]}, sort_keys=True))
    if args.report:
        report.save(args.report, timings=not args.no_timings)
    if args.csv:
        export_paths_csv(result.paths, args.csv)
    if args.svg:
        render_svg(ws, result.paths, args.svg, graph=result.final_graph if args.show_graph else None)
    if not args.quiet:
        print(generate_report(report), file=sys.stderr)
    return EXIT_OK


def cmd_isolines(args) -> int:
    ws = _workspace(args.workspace)
    cell = args.cell_size if args.cell_size else args.l / 4.0
    isolines = extract_isolines(build_distance_field(ws, cell), args.l)
    _write_json({
        "l": args.l,
        "isolines": [{"layer": iso.layer, "points": iso.points.tolist()} for iso in isolines],
    }, args.out)
    return EXIT_OK


def cmd_isograph(args) -> int:
    ws = _workspace(args.workspace)
    cell = args.cell_size if args.cell_size else args.l / 4.0
    isolines = extract_isolines(build_distance_field(ws, cell), args.l)
    g = build_isograph(isolines, args.l, ws, bridge=args.bridge)
    if args.delta:
        g = augment(g, args.delta)
    data = g.to_dict()
    data["workspace"] = ws.to_dict()
    _write_json(data, args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    data = json.loads(Path(args.isograph).read_text(encoding="utf-8"))
    ws = Workspace.from_dict(data["workspace"]) if "workspace" in data else None
    g = Isograph.from_dict(data, ws)
    if args.roots:
        roots = [int(r) for r in args.roots.split(",")]
    elif args.robots:
        roots = snap_roots(g, parse_robots(args.robots))
    else:
        raise ConfigurationError("give --roots (isovertex ids) or --robots (positions)")
    try:
        inst = MmrtcInstance(g, roots)
    except ValueError as exc:
        raise ConfigurationError(str(exc))
    model = build_model(inst)
    if args.export_lp:
        model.write_lp(args.export_lp)
    solver_cfg = SolverConfig(args.solver, args.time_limit, args.node_limit)
    result = solve(model, None, solver_cfg.time_limit, solver_cfg.backend, solver_cfg.node_limit)
    if result.status == "infeasible":
        raise InfeasibleInstanceError("tree cover is infeasible", stage="mmrtc")
    _write_json(result.to_dict(), args.out)
    return EXIT_OK


def cmd_metrics(args) -> int:
    ws = _workspace(args.workspace)
    paths = load_paths_json(args.paths)
    cfg = PlanConfig(l=args.l, robots=[(0.0, 0.0)] * max(1, len(paths)), enable_augment=False,
                     enable_refine=False, grid=GridConfig(cell_size=args.cell_size))
    report = compute_metrics(paths, ws, cfg)
    _write_json(report.to_dict(timings=False), args.out)
    return EXIT_OK


def cmd_render(args) -> int:
    ws = _workspace(args.workspace)
    paths = load_paths_json(args.paths) if args.paths else []
    graph = None
    if args.isograph:
        graph = Isograph.from_dict(json.loads(Path(args.isograph).read_text(encoding="utf-8")), ws)
    render_svg(ws, paths, args.out, graph=graph, title=args.title)
    return EXIT_OK


# -- parser ------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    p.add_argument("-q", "--quiet", action="store_true", help="warnings only, no text report")


def _add_solver(p: argparse.ArgumentParser):
    p.add_argument("--solver", default="bundled", help="bundled | highs | external:<command>")
    p.add_argument("--time-limit", type=float, default=None, help="seconds (default $MCFS_TIME_LIMIT or 60)")
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--export-lp", default=None, help="write the tree-cover model in LP format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcfs", description="Multi-robot connected Fermat spiral coverage planning")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="full pipeline")
    p.add_argument("workspace")
    p.add_argument("--robots", nargs="+", required=True, help="x,y or count@x,y per entry")
    p.add_argument("--l", type=float, required=True, help="isoline step (cover diameter)")
    p.add_argument("--variant", choices=sorted(VARIANTS), default="both")
    p.add_argument("--delta", type=int, default=None)
    p.add_argument("--selector", choices=SELECTOR_KINDS, default="mcs")
    p.add_argument("--no-window", action="store_true", help="mcs: two-point curvature change only")
    p.add_argument("--maximize", action="store_true", help="mcs: pick the largest curvature change")
    p.add_argument("--bridge", action="store_true", help="join disconnected isographs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cell-size", type=float, default=None)
    _add_solver(p)
    p.add_argument("--out", default=None, help="path JSON (stdout when omitted)")
    p.add_argument("--report", default=None, help="report JSON")
    p.add_argument("--no-timings", action="store_true", help="leave stage runtimes out of the report JSON")
    p.add_argument("--csv", default=None)
    p.add_argument("--svg", default=None)
    p.add_argument("--show-graph", action="store_true", help="overlay the isograph in the SVG")
    p.add_argument("--trace", default=None, help="refinement trace (JSON lines)")
    _add_common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("isolines", help="layered isolines only")
    p.add_argument("workspace")
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--cell-size", type=float, default=None)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_isolines)

    p = sub.add_parser("isograph", help="dump the isograph as JSON")
    p.add_argument("workspace")
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--cell-size", type=float, default=None)
    p.add_argument("--delta", type=int, default=None, help="augment up to this graph distance")
    p.add_argument("--bridge", action="store_true")
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_isograph)

    p = sub.add_parser("solve", help="tree cover on a dumped isograph")
    p.add_argument("isograph")
    p.add_argument("--roots", default=None, help="comma-separated isovertex ids, one per robot")
    p.add_argument("--robots", nargs="+", default=None, help="robot positions instead of root ids")
    _add_solver(p)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("metrics", help="recompute metrics from a path file")
    p.add_argument("workspace")
    p.add_argument("paths")
    p.add_argument("--l", type=float, required=True)
    p.add_argument("--cell-size", type=float, default=None)
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("render", help="SVG of a workspace with optional paths and isograph")
    p.add_argument("workspace")
    p.add_argument("--paths", default=None)
    p.add_argument("--isograph", default=None)
    p.add_argument("--title", default=None)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK

    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        return args.func(args)
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (MCFSError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
