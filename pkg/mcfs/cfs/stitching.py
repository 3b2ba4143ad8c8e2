"""
Unified CFS: stitch the isolines of one tree into a single closed path

The path is kept as a doubly linked cycle of (vertex id, point index) nodes.
It starts as the root isoline, counterclockwise from the entry point. For
each tree edge (u, v) in DFS preorder, a tuple (a on I_u, b on I_v) is
chosen and the whole loop of v, counterclockwise from b to B_v(b), is
spliced in front of a:

    ... -> pred(a) -> b -> b+1 -> ... -> B_v(b) -> a -> ...

Only a and b lose their original predecessor, and both are marked used, so
every unused point still follows its own isoline predecessor.
If the entry point itself anchors a stitch, the cycle is emitted backwards
when that ends the path nearer the entry.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import UnstitchableEdgeError
from ..isograph.graph import Isograph
from ..isograph.tuples import StitchingTuple
from .curvature import discrete_curvature, turning_curvature
from .selectors import Selector

logger = logging.getLogger(__name__)

Node = Tuple[int, int]


@dataclass(frozen=True)
class StitchRecord:
    parent: int
    child: int
    anchor: int                         # point index on the parent isoline
    entry: int                          # point index on the child isoline
    delta_kappa: Optional[float] = None
    windowed_delta_kappa: Optional[float] = None


@dataclass(eq=False)
class CoveragePath:
    """Ordered point sequence for one robot"""

    robot: int
    points: np.ndarray
    sources: List[Tuple[int, int]]
    closed: bool = True
    stitches: List[StitchRecord] = field(default_factory=list)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.points)

    def segment_lengths(self) -> np.ndarray:
        if len(self.points) < 2:
            return np.zeros(0)
        pts = np.vstack([self.points, self.points[:1]]) if self.closed else self.points
        return np.linalg.norm(np.diff(pts, axis=0), axis=1)

    @property
    def length(self) -> float:
        """Geometric length, including the closing segment of a closed path"""
        return float(self.segment_lengths().sum())

    @property
    def max_gap(self) -> float:
        """Largest distance between consecutive points (open order)"""
        if len(self.points) < 2:
            return 0.0
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).max())

    @property
    def entry_exit_distance(self) -> float:
        return float(np.linalg.norm(self.points[-1] - self.points[0]))

    def to_dict(self) -> Dict:
        return {
            "robot": self.robot,
            "closed": self.closed,
            "points": self.points.tolist(),
            "sources": [list(s) for s in self.sources],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "CoveragePath":
        points = np.asarray(data["points"], dtype=float).reshape(-1, 2)
        sources = [tuple(s) for s in data.get("sources", [])]
        return cls(int(data.get("robot", 0)), points, sources, bool(data.get("closed", True)))


class _SplicedPath:
    """Doubly linked cycle of path nodes"""

    def __init__(self, g: Isograph):
        self.g = g
        self.next: Dict[Node, Node] = {}
        self.prev: Dict[Node, Node] = {}
        self.used = set()

    def point(self, node: Node) -> np.ndarray:
        return self.g.vertex(node[0]).points[node[1]]

    def _loop_nodes(self, vid: int, start: int) -> List[Node]:
        n = self.g.weight(vid)
        return [(vid, (start + k) % n) for k in range(n)]

    def open_loop(self, vid: int, start: int):
        nodes = self._loop_nodes(vid, start)
        for a, b in zip(nodes, nodes[1:] + nodes[:1]):
            self.next[a] = b
            self.prev[b] = a

    def insert_before(self, anchor: Node, vid: int, start: int):
        nodes = self._loop_nodes(vid, start)
        before = self.prev[anchor]
        for a, b in zip(nodes, nodes[1:]):
            self.next[a] = b
            self.prev[b] = a
        self.next[before] = nodes[0]
        self.prev[nodes[0]] = before
        self.next[nodes[-1]] = anchor
        self.prev[anchor] = nodes[-1]

    def walk(self, start: Node) -> List[Node]:
        nodes = [start]
        node = self.next[start]
        while node != start:
            nodes.append(node)
            node = self.next[node]
        return nodes


class _StitchGeometry:
    """Curvature change of a candidate stitch on the current path"""

    def __init__(self, path: _SplicedPath, parent: int, child: int):
        self.path = path
        self.parent = parent
        self.child = child
        self._scores: Dict[StitchingTuple, Tuple[float, float]] = {}

    def _isoline_kappa(self, node: Node) -> float:
        return discrete_curvature(self.path.g.vertex(node[0]).points, node[1])

    def delta_kappa(self, t: StitchingTuple) -> Tuple[float, float]:
        if t not in self._scores:
            self._scores[t] = self._delta_kappa(t)
        return self._scores[t]

    def _delta_kappa(self, t: StitchingTuple) -> Tuple[float, float]:
        path = self.path
        n_child = path.g.weight(self.child)
        a = (self.parent, t.p_index)
        b = (self.child, t.q_index)
        x = path.prev[a]
        y = (self.child, (t.q_index - 1) % n_child)
        after_b = (self.child, (t.q_index + 1) % n_child)
        before_y = (self.child, (t.q_index - 2) % n_child)
        pt = path.point
        try:
            change_a = turning_curvature(pt(y), pt(a), pt(path.next[a])) - self._isoline_kappa(a)
            change_b = turning_curvature(pt(x), pt(b), pt(after_b)) - self._isoline_kappa(b)
            change_x = turning_curvature(pt(path.prev[x]), pt(x), pt(b)) - self._isoline_kappa(x)
            change_y = turning_curvature(pt(before_y), pt(y), pt(a)) - self._isoline_kappa(y)
        except ValueError:
            return float("inf"), float("inf")
        raw = change_a + change_b
        return raw, raw + change_x + change_y


def snap_entry(g: Isograph, vid: int, entry) -> int:
    """Index of the point of I_vid nearest to ``entry`` (lowest index on ties)"""
    points = g.vertex(vid).points
    target = np.asarray(tuple(entry), dtype=float)
    return int(np.argmin(np.linalg.norm(points - target, axis=1)))


def preorder_edges(tree, descending: bool = False) -> List[Tuple[int, int]]:
    """Tree edges as (parent, child) in DFS preorder from the root"""
    adjacency: Dict[int, List[int]] = {vid: [] for vid in tree.vertices}
    for a, b in tree.edges:
        adjacency[a].append(b)
        adjacency[b].append(a)
    root = tree.root
    order = []
    seen = {root}
    stack = [(root, iter(sorted(adjacency[root], reverse=descending)))]
    while stack:
        u, children = stack[-1]
        for w in children:
            if w not in seen:
                seen.add(w)
                order.append((u, w))
                stack.append((w, iter(sorted(adjacency[w], reverse=descending))))
                break
        else:
            stack.pop()
    return order


def unified_cfs(
    tree,
    g: Isograph,
    entry,
    selector: Selector,
    robot: int = 0,
    descending: bool = False
) -> CoveragePath:
    """
    Stitch every isoline of ``tree`` into one closed path starting at ``entry``

    Args:
        tree: Rooted tree (``root``, ``vertices``, ``edges`` as id pairs)
        g: Isograph the tree lives in
        entry: Start position; snapped to the nearest point of the root isoline
        selector: Tuple selector (its generator state advances)
        robot: Robot index stored on the path
        descending: Visit children in descending id order

    Raises:
        UnstitchableEdgeError: every tuple of some edge uses a stitched point
    """
    root = tree.root
    start = snap_entry(g, root, entry)
    path = _SplicedPath(g)
    path.open_loop(root, start)

    selected: Dict[int, StitchingTuple] = {}
    records = []
    for u, v in preorder_edges(tree, descending):
        candidates = [
            t for t in g.tuples(u, v)
            if (u, t.p_index) not in path.used and (v, t.q_index) not in path.used
        ]
        if not candidates:
            raise UnstitchableEdgeError(u, v, stage="cfs")

        chosen = selector.select(candidates, selected.get(u), g.weight(u), _StitchGeometry(path, u, v))
        scores = selector.last_scores
        records.append(StitchRecord(
            u, v, chosen.p_index, chosen.q_index,
            scores[0] if scores else None,
            scores[1] if scores else None,
        ))
        path.insert_before((u, chosen.p_index), v, chosen.q_index)
        path.used.add((u, chosen.p_index))
        path.used.add((v, chosen.q_index))
        selected[v] = chosen

    nodes = path.walk((root, start))
    if _closes_shorter_reversed(path, (root, start)):
        nodes = nodes[:1] + nodes[:0:-1]
    points = np.array([path.point(node) for node in nodes])
    sources = [g.vertex(vid).source_of(idx) for vid, idx in nodes]
    return CoveragePath(robot=robot, points=points, sources=sources, closed=True, stitches=records)


def _closes_shorter_reversed(path: _SplicedPath, entry: Node) -> bool:
    """
    True when a stitch anchored at the entry point and walking the cycle
    backwards ends the path closer to where it started
    """
    if entry not in path.used:
        return False
    here = path.point(entry)
    forward = np.linalg.norm(path.point(path.prev[entry]) - here)
    backward = np.linalg.norm(path.point(path.next[entry]) - here)
    return bool(backward < forward)


def stitch_tree(tree, g: Isograph, entry, selector: Selector, robot: int = 0) -> CoveragePath:
    """unified_cfs with one retry in reversed child order"""
    try:
        return unified_cfs(tree, g, entry, selector.fresh(robot), robot)
    except UnstitchableEdgeError as exc:
        logger.warning("Robot %d: %s; retrying with reversed child order", robot, exc)
        return unified_cfs(tree, g, entry, selector.fresh(robot), robot, descending=True)


def stitch_all(trees: Sequence, g: Isograph, entries: Sequence, selector: Selector) -> List[CoveragePath]:
    return [stitch_tree(tree, g, entries[i], selector, robot=i) for i, tree in enumerate(trees)]
