"""
Tree-cover solver backends

    bundled            exact best-first branch-and-bound with plunging,
                       combinatorial bounds only (desk-scale isographs)
    highs              the MIP handed to HiGHS through scipy.optimize.milp
    external:<cmd>     the MIP written as an LP file and solved by an outside
                       program that writes "name value" lines

Every backend returns at least the warm start.
"""

import heapq
import logging
import math
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from networkx.utils import UnionFind
from scipy.optimize import Bounds, LinearConstraint, milp

from ..exceptions import InfeasibleInstanceError, IntegrityError
from ..isograph.graph import edge_key
from .instance import MmrtcInstance, Tree, TreeCover
from .model import EdgeAssignment, MipModel, VertexAssignment, build_model
from .warm_start import warm_start

logger = logging.getLogger(__name__)

BACKENDS = ("bundled", "highs", "external")
STATUSES = ("optimal", "feasible", "infeasible")
EPS = 1e-9


@dataclass
class SolveResult:
    cover: Optional[TreeCover]
    status: str
    backend: str
    lower_bound: float = 0.0
    nodes: int = 0
    runtime: float = 0.0
    history: List[Tuple[float, float]] = field(default_factory=list)   # (seconds, incumbent makespan)

    @property
    def makespan(self) -> float:
        return self.cover.makespan if self.cover is not None else math.inf

    def to_dict(self) -> Dict:
        return {
            "status": self.status,
            "backend": self.backend,
            "makespan": self.makespan if self.cover is not None else None,
            "lower_bound": self.lower_bound,
            "nodes": self.nodes,
            "cover": self.cover.to_dict() if self.cover is not None else None,
        }


def parse_backend(spec: str) -> Tuple[str, Optional[str]]:
    """'bundled' | 'highs' | 'external:<command>' -> (name, command)"""
    name, _, command = spec.partition(":")
    if name not in BACKENDS:
        raise ValueError(f"Unknown solver backend: {spec}. Choose from bundled, highs, external:<command>")
    if name == "external":
        if not command.strip():
            raise ValueError("external solver needs a command: external:<command>")
        return name, command.strip()
    return name, None


def solve(
    model: MipModel,
    warm: Optional[TreeCover] = None,
    time_limit: float = 60.0,
    backend: str = "bundled",
    node_limit: Optional[int] = None
) -> SolveResult:
    """
    Solve the tree-cover model

    Args:
        model: Model from build_model
        warm: Initial feasible cover; computed with warm_start when None
        time_limit: Seconds; 0 returns the warm start
        backend: bundled, highs or external:<command>
        node_limit: Branch-and-bound node cap (bundled only)
    """
    name, command = parse_backend(backend)
    inst = model.instance
    start = time.perf_counter()
    if warm is None:
        try:
            warm = warm_start(inst)
        except InfeasibleInstanceError as exc:
            logger.error("%s", exc)
            return SolveResult(None, "infeasible", name)

    if time_limit <= 0:
        return SolveResult(warm.replace(warm.trees), "feasible", name, history=[(0.0, warm.makespan)])

    if name == "bundled":
        result = BranchAndBound(inst, warm, time_limit, node_limit).run()
    elif name == "highs":
        result = _solve_highs(model, warm, time_limit)
    else:
        result = _solve_external(model, warm, time_limit, command)

    result.runtime = time.perf_counter() - start
    result.cover.status = result.status
    logger.info(
        "MMRTC (%s): %s, makespan %.2f, bound %.2f, %d nodes, %.2fs",
        name, result.status, result.makespan, result.lower_bound, result.nodes, result.runtime,
    )
    return result


def solve_instance(
    inst: MmrtcInstance,
    time_limit: float = 60.0,
    backend: str = "bundled",
    node_limit: Optional[int] = None
) -> SolveResult:
    return solve(build_model(inst), None, time_limit, backend, node_limit)


# -- bundled branch-and-bound ------------------------------------------


def _bits(mask: int):
    p = 0
    while mask:
        if mask & 1:
            yield p
        mask >>= 1
        p += 1


def _spanning_edges(edge_weight: Dict[Tuple[int, int], float], members: Sequence[int]):
    """Minimum spanning edges of the subgraph on ``members`` (position indices)"""
    inside = set(members)
    candidates = sorted(
        (w, a, b) for (a, b), w in edge_weight.items() if a in inside and b in inside
    )
    components = UnionFind(members)
    chosen = []
    for w, a, b in candidates:
        if components[a] != components[b]:
            components.union(a, b)
            chosen.append((w, a, b))
    return chosen


class BranchAndBound:
    """
    Branches on which robots a vertex joins, vertices in descending weight

    A node fixes the robot subsets of the first d vertices of the branching
    order. Its bound is the largest of:

        robot bound    current weight of robot i plus the cheapest connection
                       of its farthest member to its root through undecided
                       vertices
        cover bound    for each unassigned vertex, the cheapest robot that
                       could still reach it
        average        (all assigned weight + unassigned weight) / k

    At a leaf every robot's vertex set is fixed and its best tree is the
    minimum spanning tree of the induced subgraph, so leaf costs are exact.
    Robots sharing a root with identical vertex sets so far are
    interchangeable: the higher index may only join where the lower does.
    """

    def __init__(self, inst: MmrtcInstance, warm: TreeCover, time_limit: float, node_limit: Optional[int] = None):
        g = inst.graph
        self.inst = inst
        self.warm = warm
        self.time_limit = time_limit
        self.node_limit = node_limit
        self.ids = g.vertex_ids
        self.n = len(self.ids)
        self.k = inst.k
        pos = {v: p for p, v in enumerate(self.ids)}
        self.w = [g.weight(v) for v in self.ids]
        self.adjacency = [[pos[u] for u in g.neighbors(v)] for v in self.ids]
        self.edge_weight = {(pos[e.u], pos[e.v]): float(e.weight) for e in g.edges}
        self.order = sorted(range(self.n), key=lambda p: (-self.w[p], self.ids[p]))
        self.roots = [pos[r] for r in inst.roots]
        self.forced: Dict[int, int] = {}
        for i, r in enumerate(self.roots):
            self.forced[r] = self.forced.get(r, 0) | (1 << i)
        self.prefix = [0]
        for p in self.order:
            self.prefix.append(self.prefix[-1] | (1 << p))
        self.twins = [(i, j) for i in range(self.k) for j in range(i + 1, self.k) if self.roots[i] == self.roots[j]]
        self.subsets = sorted(range(1, 1 << self.k), key=lambda a: (bin(a).count("1"), a))

        self.nodes = 0
        self.best_makespan = warm.makespan
        self.best_sets: Optional[Tuple[int, ...]] = None
        self.history: List[Tuple[float, float]] = [(0.0, warm.makespan)]
        self._start = 0.0

    # bounding

    def _load(self, mask: int) -> float:
        return float(sum(self.w[p] for p in _bits(mask)))

    def _reach(self, root: int, mask: int, decided: int) -> List[float]:
        """Node-weighted distances from the root; members cost 0, undecided vertices their weight"""
        dist = [math.inf] * self.n
        dist[root] = 0.0
        heap = [(0.0, root)]
        while heap:
            d, p = heapq.heappop(heap)
            if d > dist[p]:
                continue
            for q in self.adjacency[p]:
                if (mask >> q) & 1:
                    step = 0.0
                elif not (decided >> q) & 1:
                    step = self.w[q]
                else:
                    continue
                if d + step < dist[q]:
                    dist[q] = d + step
                    heapq.heappush(heap, (d + step, q))
        return dist

    def bound(self, sets: Tuple[int, ...], depth: int) -> float:
        decided = self.prefix[depth]
        covered = 0
        for mask in sets:
            covered |= mask
        free = [p for p in range(self.n) if not (covered >> p) & 1]
        cheapest = {p: math.inf for p in free}
        loads = []
        lb = 0.0
        for i, mask in enumerate(sets):
            load = self._load(mask)
            loads.append(load)
            dist = self._reach(self.roots[i], mask, decided)
            farthest = max(dist[p] for p in _bits(mask))
            if math.isinf(farthest):
                return math.inf
            lb = max(lb, load + farthest)
            for p in free:
                cheapest[p] = min(cheapest[p], load + max(farthest, dist[p]))
        if free:
            lb = max(lb, max(cheapest.values()))
        average = (sum(loads) + sum(self.w[p] for p in free)) / self.k
        return max(lb, average)

    def leaf_cost(self, sets: Tuple[int, ...]) -> float:
        costs = []
        for mask in sets:
            members = list(_bits(mask))
            chosen = _spanning_edges(self.edge_weight, members)
            if len(chosen) != len(members) - 1:
                return math.inf
            costs.append(self._load(mask) + sum(w for w, _, _ in chosen))
        return max(costs)

    # branching

    def children(self, sets: Tuple[int, ...], depth: int) -> List[Tuple[float, int, int, Tuple[int, ...]]]:
        p = self.order[depth]
        bit = 1 << p
        forced = self.forced.get(p, 0)
        out = []
        for a in self.subsets:
            if a & forced != forced:
                continue
            if any(sets[i] == sets[j] and (a >> j) & 1 and not (a >> i) & 1 for i, j in self.twins):
                continue
            child = tuple(mask | bit if (a >> i) & 1 else mask for i, mask in enumerate(sets))
            lb = self.bound(child, depth + 1)
            if lb < self.best_makespan - EPS:
                out.append((lb, bin(a).count("1"), a, child))
        out.sort(key=lambda c: c[:3])
        return out

    def _out_of_budget(self) -> bool:
        if self.node_limit is not None and self.nodes >= self.node_limit:
            return True
        return time.perf_counter() - self._start >= self.time_limit

    def run(self) -> SolveResult:
        self._start = time.perf_counter()
        root_sets = tuple(1 << r for r in self.roots)
        root_lb = self.bound(root_sets, 0)
        heap = [(root_lb, 0, 0, root_sets)]
        counter = 1
        exhausted = True

        while heap:
            if self._out_of_budget():
                exhausted = False
                break
            lb, neg_depth, _, sets = heapq.heappop(heap)
            if lb >= self.best_makespan - EPS:
                heap = []
                break
            depth = -neg_depth
            # plunge along the best child, leaving siblings on the heap
            while True:
                self.nodes += 1
                if depth == self.n:
                    cost = self.leaf_cost(sets)
                    if cost < self.best_makespan - EPS:
                        self.best_makespan = cost
                        self.best_sets = sets
                        self.history.append((time.perf_counter() - self._start, cost))
                        logger.debug("Incumbent %.3f after %d nodes", cost, self.nodes)
                    break
                kids = self.children(sets, depth)
                if not kids:
                    break
                for kid_lb, _, _, kid in kids[1:]:
                    heapq.heappush(heap, (kid_lb, -(depth + 1), counter, kid))
                    counter += 1
                lb, _, _, sets = kids[0]
                depth += 1
                if self._out_of_budget():
                    exhausted = False
                    heapq.heappush(heap, (lb, -depth, counter, sets))
                    break
            if not exhausted:
                break

        open_bounds = [entry[0] for entry in heap if entry[0] < self.best_makespan]
        lower_bound = min(open_bounds + [self.best_makespan]) if not exhausted else self.best_makespan
        status = "optimal" if exhausted else "feasible"
        return SolveResult(self._cover(), status, "bundled", lower_bound, self.nodes, 0.0, self.history)

    def _cover(self) -> TreeCover:
        if self.best_sets is None:
            return self.warm.replace(self.warm.trees)
        trees = []
        for i, mask in enumerate(self.best_sets):
            members = list(_bits(mask))
            chosen = _spanning_edges(self.edge_weight, members)
            trees.append(Tree.of(
                self.inst.roots[i],
                [self.ids[p] for p in members],
                [(self.ids[a], self.ids[b]) for _, a, b in chosen],
            ))
        return TreeCover(trees, self.inst.graph).validate(self.inst.roots)


# -- MIP backends ------------------------------------------------------


def _assignment_from_vector(model: MipModel, values: Dict[str, float]) -> Tuple[EdgeAssignment, VertexAssignment]:
    x: EdgeAssignment = {}
    y: VertexAssignment = {}
    for name, value in values.items():
        parts = name.split("_")
        if value < 0.5:
            continue
        if parts[0] == "x" and len(parts) == 4:
            x[(int(parts[1]), (int(parts[2]), int(parts[3])))] = 1
        elif parts[0] == "y" and len(parts) == 3:
            y[(int(parts[1]), int(parts[2]))] = 1
    return x, y


def _solve_highs(model: MipModel, warm: TreeCover, time_limit: float) -> SolveResult:
    a, lb, ub = model.matrix()
    res = milp(
        c=model.objective(),
        integrality=np.array(model.integral, dtype=int),
        bounds=Bounds(np.zeros(model.n_variables), np.array(model.upper_bounds)),
        constraints=LinearConstraint(a, lb, ub),
        options={"time_limit": float(time_limit), "disp": False},
    )
    if res.x is None:
        logger.warning("HiGHS returned no solution (%s); keeping the warm start", res.message)
        return SolveResult(warm.replace(warm.trees), "feasible", "highs", history=[(0.0, warm.makespan)])
    x, y = _assignment_from_vector(model, dict(zip(model.names, res.x)))
    cover = decode(x, y, model.instance)
    bound = float(getattr(res, "mip_dual_bound", None) or 0.0)
    if cover.makespan > warm.makespan + EPS:
        return SolveResult(warm.replace(warm.trees), "feasible", "highs", bound, history=[(0.0, warm.makespan)])
    status = "optimal" if res.status == 0 else "feasible"
    return SolveResult(cover, status, "highs", bound if status == "feasible" else cover.makespan,
                       history=[(0.0, warm.makespan), (0.0, cover.makespan)])


def read_solution(path) -> Dict[str, float]:
    """Variable values from a text file of "name value" lines; other lines are skipped"""
    values = {}
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if len(parts) < 2 or parts[0].startswith(("#", "\\")):
            continue
        try:
            values[parts[0]] = float(parts[1])
        except ValueError:
            continue
    return values


def _solve_external(model: MipModel, warm: TreeCover, time_limit: float, command: str) -> SolveResult:
    fallback = SolveResult(warm.replace(warm.trees), "feasible", "external", history=[(0.0, warm.makespan)])
    with tempfile.TemporaryDirectory(prefix="mcfs_") as tmp:
        lp_path = Path(tmp) / "model.lp"
        sol_path = Path(tmp) / "solution.txt"
        model.write_lp(lp_path)
        if "{model}" in command or "{solution}" in command:
            argv = shlex.split(command.format(model=lp_path, solution=sol_path))
        else:
            argv = shlex.split(command) + [str(lp_path), str(sol_path)]
        logger.info("Running external solver: %s", " ".join(argv))
        try:
            subprocess.run(argv, check=True, timeout=time_limit + 10.0, capture_output=True)
        except (OSError, subprocess.SubprocessError) as exc:
            logger.warning("External solver failed (%s); keeping the warm start", exc)
            return fallback
        if not sol_path.exists():
            logger.warning("External solver wrote no solution file; keeping the warm start")
            return fallback
        x, y = _assignment_from_vector(model, read_solution(sol_path))
    try:
        cover = decode(x, y, model.instance)
    except IntegrityError as exc:
        logger.warning("External solution rejected: %s", exc)
        return fallback
    if cover.makespan > warm.makespan + EPS:
        return fallback
    # an outside solver's optimality claim is not visible through the file protocol
    return SolveResult(cover, "feasible", "external", history=[(0.0, warm.makespan), (0.0, cover.makespan)])


def decode(x: EdgeAssignment, y: VertexAssignment, inst: MmrtcInstance) -> TreeCover:
    """
    Trees from binary edge/vertex assignments

    Raises:
        IntegrityError: the assignment violates a tree, root or cover constraint
    """
    trees = []
    for i, root in enumerate(inst.roots):
        vertices = sorted(v for (j, v), val in y.items() if j == i and val)
        edges = sorted(edge_key(*e) for (j, e), val in x.items() if j == i and val)
        trees.append(Tree(root, tuple(vertices), tuple(edges)))
    return TreeCover(trees, inst.graph).validate(inst.roots)
