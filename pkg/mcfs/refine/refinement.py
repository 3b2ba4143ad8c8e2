"""
Tree-cover refinement

Repeated isovertices are popped in decreasing order of occurrence and split
with the neighbor giving the most balanced tree costs. When no repetition is
left, one leaf of the most expensive tree is duplicated into the cheapest
tree that borders it, which creates a new repetition to split. The best
cover seen (by makespan) is returned.
"""

import heapq
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set

from ..isograph.graph import Isograph
from ..mmrtc.instance import Tree, TreeCover
from .splitting import DEFAULT_BUDGET, SplitOutcome, pis

logger = logging.getLogger(__name__)


@dataclass
class RefinementState:
    current: TreeCover
    best: TreeCover
    heap: List = field(default_factory=list)          # (-occurrences, vertex id)
    used: Set[int] = field(default_factory=set)
    next_id: int = 0

    @property
    def graph(self) -> Isograph:
        return self.current.graph

    def push(self, vid: int):
        count = self.current.occurrences()[vid]
        heapq.heappush(self.heap, (-count, vid))

    def discard(self, vid: int):
        self.heap = [entry for entry in self.heap if entry[1] != vid]
        heapq.heapify(self.heap)


@dataclass
class RefinementResult:
    cover: TreeCover                                   # best cover found
    initial_makespan: float
    trace: List[Dict] = field(default_factory=list)

    @property
    def graph(self) -> Isograph:
        return self.cover.graph

    @property
    def makespan(self) -> float:
        return self.cover.makespan

    @property
    def splits(self) -> int:
        return sum(1 for r in self.trace if r["event"] == "split")

    def write_trace(self, path) -> None:
        with open(path, "w") as f:
            for record in self.trace:
                f.write(json.dumps(record, sort_keys=True) + "\n")


def air(state: RefinementState) -> Optional[Dict]:
    """
    Duplicate one leaf of the most expensive tree into the cheapest tree
    adjacent to it

    Candidates are leaves not yet used for splitting and not produced by a
    split. Trees are tried from the cheapest; within a tree the lowest leaf
    id, then the lowest attaching vertex id wins.

    Returns:
        Trace record of the duplication, or None when nothing qualifies
    """
    cover = state.current
    g = cover.graph
    costs = cover.costs
    order = sorted(range(cover.k), key=lambda i: (costs[i], i))
    top = max(range(cover.k), key=lambda i: (costs[i], -i))
    leaves = [
        x for x in cover.trees[top].leaves()
        if x not in state.used and not g.vertex(x).is_split
    ]
    if not leaves:
        return None
    for i in order:
        if i == top:
            continue
        tree = cover.trees[i]
        for x in leaves:
            if x in tree:
                continue
            anchors = [
                y for y in g.neighbors(x)
                if y in tree and y not in state.used and g.edge(x, y).kind != "nonadjacent"
            ]
            if anchors:
                y = anchors[0]
                trees = list(cover.trees)
                trees[i] = Tree.of(tree.root, tree.vertices + (x,), tree.edges + ((x, y),))
                state.current = cover.replace(trees)
                state.push(x)
                logger.debug("AIR: leaf %d of tree %d duplicated into tree %d via (%d, %d)", x, top, i, x, y)
                return {"event": "air", "vertex": x, "from_tree": top, "to_tree": i, "anchor": y,
                        "makespan_after": state.current.makespan}
    return None


def refine(g: Isograph, sol: TreeCover, budget: int = DEFAULT_BUDGET, trace_path=None) -> RefinementResult:
    """
    Refine a feasible tree cover

    Args:
        g: Isograph the cover lives in
        sol: Feasible cover
        budget: Cap on evaluated tuple assignments per split
        trace_path: Optional JSON-lines file for the per-iteration trace

    Returns:
        RefinementResult whose cover never has a larger makespan than ``sol``
    """
    start = sol if sol.graph is g else sol.replace(sol.trees, g)
    state = RefinementState(current=start, best=start, next_id=max(g.vertex_ids) + 1)
    trace: List[Dict] = []

    for vid in start.repeated():
        state.push(vid)
    if not state.heap:
        record = air(state)
        if record:
            trace.append(record)

    iteration = 0
    while state.heap:
        _, u = heapq.heappop(state.heap)
        cover = state.current
        before = cover.makespan
        if u not in cover.graph or cover.occurrences()[u] < 2:
            state.used.add(u)
            continue

        best: Optional[SplitOutcome] = None
        for v in cover.graph.neighbors(u):
            if v in state.used:
                continue
            outcome = pis(cover, u, v, budget, state.next_id)
            if outcome is not None and (best is None or outcome.h < best.h):
                best = outcome

        if best is None:
            state.used.add(u)
            trace.append({"event": "skip", "popped": u, "makespan_before": before})
            logger.debug("Refine: no admissible split for isovertex %d", u)
        else:
            # u and v are original isovertices and both leave the pool
            iteration += 1
            state.current = best.cover
            state.next_id += len(best.split_ids)
            state.used.update({u, best.v, *best.split_ids})
            state.discard(best.v)
            trace.append({
                "event": "split", "iteration": iteration, "popped": u, "neighbor": best.v, "h": best.h,
                "makespan_before": before, "makespan_after": best.cover.makespan,
                "split_into": list(best.split_ids),
            })
            if state.current.makespan < state.best.makespan:
                state.best = state.current
            logger.debug("Refine: split (%d, %d) h=%.3f makespan %.2f -> %.2f",
                         u, best.v, best.h, before, state.current.makespan)

        if not state.heap:
            air_record = air(state)
            if air_record:
                trace.append(air_record)

    result = RefinementResult(state.best, sol.makespan, trace)
    logger.info("Refinement: makespan %.2f -> %.2f (%d splits)", sol.makespan, result.makespan, result.splits)
    if trace_path is not None:
        result.write_trace(Path(trace_path))
    return result
