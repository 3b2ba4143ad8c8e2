"""
Pairwise isovertex splitting

A repeated isovertex u and a neighbor v are cut into one closed loop per tree
containing u. Cutting at stitching tuples o_1..o_m (sorted by their point on
I_u) gives loop j as

    I_u from p_j counterclockwise up to the point before p_{j+1},
    then I_v from the point before q_{j+1} clockwise back to q_j

so the loops partition the points of I_u and I_v. Each tree containing u
receives one loop as a new isovertex z and its edges to u (and to v) are
rewired to z.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np
from scipy.spatial.distance import cdist

from ..geometry.isolines import Isoline
from ..geometry.workspace import ring_perimeter, signed_area
from ..isograph.graph import IsoEdge, Isograph, Isovertex, edge_key
from ..isograph.tuples import StitchingTuple, gap_limit, mutual_nearest, stitch_gap
from ..mmrtc.instance import Tree, TreeCover

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 4096


@dataclass(eq=False)
class SplitLoop:
    """Closed loop cut from I_u and I_v; ``members`` holds (vertex id, point index) per point"""

    points: np.ndarray
    members: List[Tuple[int, int]]
    start: StitchingTuple
    stop: StitchingTuple

    def __len__(self) -> int:
        return len(self.points)

    @property
    def key(self) -> Tuple[int, int, int, int]:
        return (self.start.p_index, self.start.q_index, self.stop.p_index, self.stop.q_index)

    @property
    def junctions(self) -> Set[int]:
        """Loop indices whose predecessor lies on the other isoline"""
        return {i for i in range(len(self.members)) if self.members[i - 1][0] != self.members[i][0]}

    def max_gap(self) -> float:
        return float(np.max(np.linalg.norm(self.points - np.roll(self.points, 1, axis=0), axis=1)))


@dataclass
class _Link:
    tuples: List[Tuple[int, int]]          # (index on the loop, index on the neighbor)
    kind: str
    weight: float
    penalty: float = 0.0


@dataclass(eq=False)
class SplitOutcome:
    """Best split of (u, v) found by pis"""

    u: int
    v: int
    h: float
    loops: List[SplitLoop]                 # loops[j] goes to trees_u[j]
    trees_u: List[int]                     # robot indices of the trees containing u
    costs: List[float] = field(default_factory=list)
    graph: Optional[Isograph] = None
    cover: Optional[TreeCover] = None
    split_ids: List[int] = field(default_factory=list)


def cyclic_order_ok(values: Sequence[int]) -> bool:
    """True when ``values`` is a rotation of a strictly increasing sequence"""
    m = len(values)
    if m <= 2:
        return len(set(values)) == m
    descents = sum(1 for j in range(m) if values[(j + 1) % m] < values[j])
    return descents == 1 and len(set(values)) == m


def split_loops(g: Isograph, u: int, v: int, chosen: Sequence[StitchingTuple]) -> Optional[List[SplitLoop]]:
    """
    Cut I_u and I_v at ``chosen`` (p_index on I_u, q_index on I_v)

    Returns:
        One counterclockwise loop per tuple, ordered by p_index and starting at
        that tuple, or None when the tuples cross or a loop has < 3 points
    """
    tuples = sorted(chosen, key=lambda t: t.p_index)
    ps = [t.p_index for t in tuples]
    qs = [t.q_index for t in tuples]
    if len(set(ps)) != len(ps) or not cyclic_order_ok(qs):
        return None
    pu, pv = g.vertex(u).points, g.vertex(v).points
    nu, nv = len(pu), len(pv)
    m = len(tuples)
    loops = []
    for j, t in enumerate(tuples):
        nxt = tuples[(j + 1) % m]
        u_count = (nxt.p_index - t.p_index) % nu or nu
        v_count = (nxt.q_index - t.q_index) % nv or nv
        members = [(u, (t.p_index + s) % nu) for s in range(u_count)]
        members += [(v, (nxt.q_index - 1 - s) % nv) for s in range(v_count)]
        if len(members) < 3:
            return None
        points = np.array([pu[i] if vid == u else pv[i] for vid, i in members])
        if signed_area(points) < 0:
            # keep the starting point first
            points = np.vstack([points[:1], points[:0:-1]])
            members = members[:1] + members[:0:-1]
        loops.append(SplitLoop(points, members, t, nxt))
    return loops


def assignments(tuples: Sequence[StitchingTuple], m: int, budget: int = DEFAULT_BUDGET) -> Iterator[Tuple[StitchingTuple, ...]]:
    """
    Unordered m-subsets of ``tuples`` (subsampled by stride so that the
    ordered count m! * C(s, m) stays within ``budget``)
    """
    if m < 1 or len(tuples) < m:
        return iter(())
    s = len(tuples)
    while s > m and math.perm(s, m) > budget:
        s -= 1
    stride = max(1, math.ceil(len(tuples) / s))
    pool = list(tuples)[::stride]
    if len(pool) < m:
        pool = list(tuples)[:m]
    return itertools.combinations(pool, m)


class _Splitter:
    """Evaluates every admissible split of (u, v) for one cover"""

    def __init__(self, cover: TreeCover, u: int, v: int):
        self.cover = cover
        self.g = cover.graph
        self.u = u
        self.v = v
        self.trees_u = cover.trees_containing(u)
        self._links: Dict[Tuple, _Link] = {}

    def admissible(self) -> bool:
        """v may vanish: in trees without u it must be a non-root leaf"""
        for i, tree in enumerate(self.cover.trees):
            if self.v in tree and self.u not in tree:
                if tree.root == self.v or tree.degree(self.v) != 1:
                    return False
        return True

    # per-tree rewiring, independent of the loop

    def rewire(self, tree: Tree) -> Tuple[List[Tuple[int, int]], List[int]]:
        """(kept edges, neighbors that connect to the new vertex)"""
        u, v = self.u, self.v
        dropped = set()
        if v in tree and edge_key(u, v) not in tree.edges:
            path = _tree_path(tree, u, v)
            dropped.add(edge_key(path[-2], v))
        kept, neighbors = [], set()
        for a, b in tree.edges:
            key = (a, b)
            if key in dropped:
                continue
            if a in (u, v) or b in (u, v):
                other = b if a in (u, v) else a
                if other not in (u, v):
                    neighbors.add(other)
                continue
            kept.append(key)
        return kept, sorted(neighbors)

    def base_cost(self, tree: Tree) -> float:
        g = self.g
        cost = tree.cost(g) - g.weight(self.u)
        if self.v in tree:
            cost -= g.weight(self.v)
        for a, b in tree.edges:
            if a in (self.u, self.v) or b in (self.u, self.v):
                cost -= g.edge(a, b).weight
        return cost

    def link(self, loop: SplitLoop, y: int) -> Optional[_Link]:
        """
        Tuples between a split loop and neighbor y, recomputed on the loop

        Stitching at a junction point (where the loop switches from I_u to
        I_v) would leave its predecessor on the other isoline, so junctions
        never anchor. Pairs whose stitch jumps further than 2.5 l are dropped.
        Returns None when y cannot be stitched to the loop at all.
        """
        key = (loop.key, y)
        if key in self._links:
            return self._links[key]
        limit = gap_limit(self.g.step)
        y_points = self.g.vertex(y).points
        junctions = loop.junctions
        sources = {}
        for src in (self.u, self.v):
            edge = self.g.edge(src, y)
            if edge is not None and edge.kind != "nonadjacent":
                sources[src] = edge
        eligible = [i for i, (vid, _) in enumerate(loop.members) if vid in sources and i not in junctions]

        pairs, best = [], None
        for p, q in mutual_nearest(loop.points, y_points, eligible):
            if stitch_gap(loop.points, p, y_points, q) > limit:
                continue
            pairs.append((p, q))
            edge = sources[loop.members[p][0]]
            if best is None or edge.weight < best.weight:
                best = edge

        result = None
        if pairs:
            result = _Link(pairs, best.kind, float(best.weight))
        else:
            candidates = [i for i in range(len(loop)) if i not in junctions]
            distance = cdist(loop.points[candidates], y_points)
            for flat in np.argsort(distance, axis=None, kind="stable"):
                row, q = np.unravel_index(flat, distance.shape)
                dist = float(distance[row, q])
                if dist > limit:
                    break
                p = candidates[row]
                if stitch_gap(loop.points, p, y_points, int(q)) <= limit:
                    result = _Link([(p, int(q))], "nonadjacent", dist, dist)
                    break
        if result is None:
            logger.debug("Split loop %s has no stitch to %d within %.3f", loop.key, y, limit)
        self._links[key] = result
        return result

    def evaluate(self, budget: int) -> Optional[SplitOutcome]:
        m = len(self.trees_u)
        tuples = self.g.tuples(self.u, self.v)
        if m < 1 or len(tuples) < m or not self.admissible():
            return None
        trees = [self.cover.trees[i] for i in self.trees_u]
        rewired = [self.rewire(t) for t in trees]
        bases = [self.base_cost(t) for t in trees]
        limit = gap_limit(self.g.step)

        best: Optional[SplitOutcome] = None
        for combo in assignments(tuples, m, budget):
            loops = split_loops(self.g, self.u, self.v, combo)
            if loops is None or any(loop.max_gap() > limit for loop in loops):
                continue
            # cost[j][l]: tree j given loop l
            cost = np.zeros((m, m))
            penalty = np.zeros((m, m))
            for j in range(m):
                for l, loop in enumerate(loops):
                    links = [self.link(loop, y) for y in rewired[j][1]]
                    if any(k is None for k in links):
                        cost[j, l] = math.inf
                        continue
                    cost[j, l] = bases[j] + len(loop) + sum(k.weight for k in links)
                    penalty[j, l] = sum(k.penalty for k in links)
            for perm in itertools.permutations(range(m)):
                costs = [cost[j, perm[j]] for j in range(m)]
                if not all(math.isfinite(c) for c in costs):
                    continue
                h = float(np.std(costs)) + float(sum(penalty[j, perm[j]] for j in range(m)))
                if best is None or h < best.h - 1e-12:
                    best = SplitOutcome(self.u, self.v, h, [loops[perm[j]] for j in range(m)], list(self.trees_u), costs)
        return best

    # committing

    def commit(self, outcome: SplitOutcome, next_id: int) -> SplitOutcome:
        g = self.g
        u, v = self.u, self.v
        new_vertices, new_edges, ids = [], [], []
        by_tree: Dict[int, int] = {}
        for j, (robot, loop) in enumerate(zip(outcome.trees_u, outcome.loops)):
            z = next_id + j
            ids.append(z)
            by_tree[robot] = z
            layer = g.vertex(u).layer
            iso = Isoline(layer, loop.points, ring_perimeter(loop.points) / len(loop))
            sources = np.array([g.vertex(vid).source_of(idx) for vid, idx in loop.members], dtype=int)
            new_vertices.append(Isovertex(z, iso, sources, split_from=(u, v)))

        neighbors = sorted((set(g.neighbors(u)) | set(g.neighbors(v))) - {u, v})
        tree_links = {robot: set(self.rewire(self.cover.trees[robot])[1]) for robot in outcome.trees_u}
        for j, (robot, loop) in enumerate(zip(outcome.trees_u, outcome.loops)):
            z = ids[j]
            for y in neighbors:
                link = self.link(loop, y)
                if link is None or (link.kind == "nonadjacent" and y not in tree_links[robot]):
                    continue
                tuples = [StitchingTuple(p, q, z, y) for p, q in link.tuples]
                new_edges.append(IsoEdge(z, y, tuples, link.kind, link.weight))

        vertices = [vx for vx in g.vertices if vx.id not in (u, v)] + new_vertices
        edges = [e for e in g.edges if u not in e.key and v not in e.key] + new_edges
        graph = Isograph(vertices, edges, g.step, g.workspace)

        trees = []
        for robot, tree in enumerate(self.cover.trees):
            if robot in by_tree:
                z = by_tree[robot]
                kept, linked = self.rewire(tree)
                verts = [x for x in tree.vertices if x not in (u, v)] + [z]
                root = z if tree.root in (u, v) else tree.root
                trees.append(Tree.of(root, verts, kept + [(z, y) for y in linked]))
            elif v in tree:
                trees.append(Tree.of(tree.root, [x for x in tree.vertices if x != v],
                                     [e for e in tree.edges if v not in e]))
            else:
                trees.append(tree)
        outcome.graph = graph
        outcome.cover = TreeCover(trees, graph).validate()
        outcome.split_ids = ids
        return outcome


def _tree_path(tree: Tree, source: int, target: int) -> List[int]:
    return nx.shortest_path(tree.as_graph(), source, target)


def pis(cover: TreeCover, u: int, v: int, budget: int = DEFAULT_BUDGET, next_id: Optional[int] = None) -> Optional[SplitOutcome]:
    """
    Best split of the repeated isovertex u with neighbor v

    Returns:
        The committed outcome (new isograph and cover, h) or None when no
        admissible split exists
    """
    splitter = _Splitter(cover, u, v)
    outcome = splitter.evaluate(budget)
    if outcome is None:
        return None
    if next_id is None:
        next_id = max(cover.graph.vertex_ids) + 1
    return splitter.commit(outcome, next_id)
