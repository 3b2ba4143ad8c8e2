"""
MCFS planner

Orchestrates the pipeline; the stages themselves live in their subpackages:

    geom       distance field and layered isolines          (geometry/)
    isograph   isovertices, stitching tuples, edges         (isograph/)
    augment    edges between isolines 2..delta layers apart (isograph/augment.py)
    roots      robot positions snapped to isovertices
    mmrtc      min-max rooted tree cover                    (mmrtc/)
    refine     splitting and improving repetitions          (refine/)
    cfs        one stitched path per tree                   (cfs/)
    metrics    coverage, overlap, curvature, makespan       (analysis.py)
"""

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .analysis import PlanReport, compute_metrics
from .cfs.selectors import Selector
from .cfs.stitching import CoveragePath, stitch_all
from .config import PlanConfig
from .exceptions import InfeasibleInstanceError, MCFSError
from .geometry.distance_field import DistanceField, build_distance_field
from .geometry.isolines import Isoline, extract_isolines
from .geometry.workspace import Workspace
from .isograph.augment import augment
from .isograph.graph import Isograph, build_isograph
from .mmrtc.instance import MmrtcInstance, TreeCover
from .mmrtc.model import MipModel, build_model
from .mmrtc.solver import SolveResult, solve
from .mmrtc.warm_start import warm_start
from .refine.refinement import RefinementResult, refine

logger = logging.getLogger(__name__)


def snap_roots(g: Isograph, positions) -> List[int]:
    """Isovertex holding the point nearest to each position (lowest id on ties)"""
    ids = np.concatenate([np.full(vx.weight, vx.id) for vx in g.vertices])
    points = np.vstack([vx.points for vx in g.vertices])
    roots = []
    for position in positions:
        d = np.linalg.norm(points - np.asarray(position, dtype=float), axis=1)
        nearest = np.flatnonzero(d <= d.min() + 1e-12)
        roots.append(int(ids[nearest].min()))
    return roots


@dataclass(eq=False)
class PlanResult:
    """Every intermediate of one run"""

    config: PlanConfig
    workspace: Workspace
    distance_field: Optional[DistanceField] = None
    isolines: List[Isoline] = field(default_factory=list)
    isograph: Optional[Isograph] = None             # before augmentation
    graph: Optional[Isograph] = None                # solved graph (augmented if enabled)
    roots: List[int] = field(default_factory=list)
    model: Optional[MipModel] = None
    warm: Optional[TreeCover] = None
    solution: Optional[SolveResult] = None
    refinement: Optional[RefinementResult] = None
    cover: Optional[TreeCover] = None               # cover that was stitched
    paths: List[CoveragePath] = field(default_factory=list)
    report: Optional[PlanReport] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def final_graph(self) -> Optional[Isograph]:
        return self.cover.graph if self.cover is not None else self.graph


class MCFSPlanner:
    """
    Multi-robot coverage planner over one workspace
    """

    def __init__(self, workspace: Workspace, config: PlanConfig, export_lp: Optional[str] = None):
        """
        Args:
            workspace: Region to cover
            config: Plan configuration
            export_lp: Optional path for the tree-cover model in LP format
        """
        self.workspace = workspace
        self.config = config
        self.export_lp = export_lp
        self.result = PlanResult(config, workspace)

    @contextmanager
    def _stage(self, name: str):
        start = time.perf_counter()
        try:
            yield
        except MCFSError as exc:
            raise exc.with_stage(name)
        finally:
            self.result.timings[name] = time.perf_counter() - start
            logger.debug("Stage %s: %.3fs", name, self.result.timings[name])

    # -- stages --------------------------------------------------------

    def build_isolines(self) -> List[Isoline]:
        cfg = self.config
        with self._stage("geom"):
            df = build_distance_field(self.workspace, cfg.cell_size)
            self.result.distance_field = df
            self.result.isolines = extract_isolines(df, cfg.l)
        return self.result.isolines

    def build_isograph(self) -> Isograph:
        if not self.result.isolines:
            self.build_isolines()
        with self._stage("isograph"):
            g = build_isograph(self.result.isolines, self.config.l, self.workspace, bridge=self.config.bridge)
            self.result.isograph = g
            self.result.graph = g
        if self.config.enable_augment:
            with self._stage("augment"):
                self.result.graph = augment(g, self.config.delta)
        return self.result.graph

    def solve_cover(self) -> TreeCover:
        if self.result.graph is None:
            self.build_isograph()
        cfg = self.config
        g = self.result.graph
        with self._stage("roots"):
            self.result.roots = snap_roots(g, cfg.robots)
            logger.info("Roots: %s", self.result.roots)
        with self._stage("mmrtc"):
            inst = MmrtcInstance(g, self.result.roots)
            model = build_model(inst)
            self.result.model = model
            if self.export_lp:
                model.write_lp(self.export_lp)
            self.result.warm = warm_start(inst)
            result = solve(model, self.result.warm, cfg.time_limit, cfg.solver.backend, cfg.solver.node_limit)
            if result.status == "infeasible" or result.cover is None:
                raise InfeasibleInstanceError("tree cover is infeasible")
            self.result.solution = result
            self.result.cover = result.cover
        if cfg.enable_refine:
            with self._stage("refine"):
                refined = refine(g, result.cover, cfg.refine.budget, cfg.refine.trace_path)
                self.result.refinement = refined
                self.result.cover = refined.cover
        return self.result.cover

    def stitch(self) -> List[CoveragePath]:
        if self.result.cover is None:
            self.solve_cover()
        cfg = self.config
        cover = self.result.cover
        with self._stage("cfs"):
            selector = Selector(cfg.selector, cfg.seed, cfg.window, cfg.maximize)
            self.result.paths = stitch_all(cover.trees, cover.graph, cfg.robots, selector)
        return self.result.paths

    def evaluate(self) -> PlanReport:
        if not self.result.paths:
            self.stitch()
        r = self.result
        info = {
            "variant": self.config.variant,
            "selector": self.config.selector,
            "robots": self.config.k,
            "isolines": len(r.isolines),
            "isovertices": len(r.cover.graph.vertices),
            "edges": len(r.graph.edges),
            "solver_status": r.solution.status,
            "solver_backend": r.solution.backend,
            "warm_start_cost": r.warm.makespan,
            "solver_cost": r.solution.makespan,
            "final_cost": r.cover.makespan,
            "splits": r.refinement.splits if r.refinement is not None else 0,
        }
        with self._stage("metrics"):
            r.report = compute_metrics(r.paths, self.workspace, self.config, info=info)
        r.report.runtime = dict(r.timings)
        return r.report

    def run(self) -> PlanResult:
        """Run every stage and return the populated PlanResult"""
        logger.info("Planning '%s' for %d robots (l=%.4f, variant %s)",
                    self.workspace.name, self.config.k, self.config.l, self.config.variant)
        self.build_isolines()
        self.build_isograph()
        self.solve_cover()
        self.stitch()
        self.evaluate()
        return self.result


def plan(ws: Workspace, cfg: PlanConfig) -> Tuple[List[CoveragePath], PlanReport]:
    result = MCFSPlanner(ws, cfg).run()
    return result.paths, result.report
