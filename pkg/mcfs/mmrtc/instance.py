"""
Min-max rooted tree cover instances and solutions

Tree cost c(T) = sum of vertex weights (point counts) + sum of edge weights.
Original edges weigh 0, so without augmentation a tree costs exactly the
number of points its stitched path visits.
"""

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from ..exceptions import IntegrityError
from ..isograph.graph import Isograph, edge_key


@dataclass
class MmrtcInstance:
    """Isograph plus one root isovertex per robot (roots may repeat)"""

    graph: Isograph
    roots: List[int]

    def __post_init__(self):
        self.roots = [int(r) for r in self.roots]
        if not self.roots:
            raise ValueError("at least one robot root is required")
        unknown = [r for r in self.roots if r not in self.graph]
        if unknown:
            raise ValueError(f"root isovertices not in the isograph: {unknown}")

    @property
    def k(self) -> int:
        return len(self.roots)

    def to_dict(self) -> Dict:
        return {"roots": list(self.roots), "graph": self.graph.to_dict()}


@dataclass(frozen=True)
class Tree:
    root: int
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def of(cls, root: int, vertices: Iterable[int], edges: Iterable[Tuple[int, int]] = ()) -> "Tree":
        verts = set(int(v) for v in vertices)
        verts.add(int(root))
        keys = sorted(set(edge_key(int(a), int(b)) for a, b in edges))
        return cls(int(root), tuple(sorted(verts)), tuple(keys))

    def __contains__(self, vid: int) -> bool:
        return vid in self.vertices

    def degree(self, vid: int) -> int:
        return sum(1 for a, b in self.edges if vid in (a, b))

    def leaves(self) -> List[int]:
        return [v for v in self.vertices if self.degree(v) == 1]

    def as_graph(self) -> nx.Graph:
        t = nx.Graph()
        t.add_nodes_from(self.vertices)
        t.add_edges_from(self.edges)
        return t

    def cost(self, g: Isograph) -> float:
        total = float(sum(g.weight(v) for v in self.vertices))
        for a, b in self.edges:
            edge = g.edge(a, b)
            total += edge.weight if edge is not None else 0.0
        return total

    def check(self, g: Isograph) -> None:
        """Raise IntegrityError unless this is a tree of ``g`` containing its root"""
        if self.root not in self.vertices:
            raise IntegrityError(f"tree does not contain its root {self.root}")
        for v in self.vertices:
            if v not in g:
                raise IntegrityError(f"tree vertex {v} is not in the isograph")
        for a, b in self.edges:
            if a not in self.vertices or b not in self.vertices:
                raise IntegrityError(f"tree edge ({a}, {b}) leaves the tree's vertex set")
            if not g.has_edge(a, b):
                raise IntegrityError(f"tree edge ({a}, {b}) is not an isograph edge")
        if len(self.edges) != len(self.vertices) - 1 or not nx.is_connected(self.as_graph()):
            raise IntegrityError(f"tree rooted at {self.root} is not connected and acyclic")

    def to_dict(self) -> Dict:
        return {"root": self.root, "vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: Dict) -> "Tree":
        return cls.of(data["root"], data["vertices"], [tuple(e) for e in data.get("edges", [])])


@dataclass(eq=False)
class TreeCover:
    """One tree per robot, in robot order"""

    trees: List[Tree]
    graph: Isograph
    status: Optional[str] = None
    _costs: Optional[List[float]] = field(default=None, init=False, repr=False)

    @property
    def costs(self) -> List[float]:
        if self._costs is None:
            self._costs = [t.cost(self.graph) for t in self.trees]
        return self._costs

    @property
    def makespan(self) -> float:
        return max(self.costs) if self.trees else 0.0

    @property
    def k(self) -> int:
        return len(self.trees)

    def occurrences(self) -> Counter:
        counts = Counter()
        for t in self.trees:
            counts.update(t.vertices)
        return counts

    def repeated(self) -> List[int]:
        return sorted(v for v, n in self.occurrences().items() if n > 1)

    def trees_containing(self, vid: int) -> List[int]:
        return [i for i, t in enumerate(self.trees) if vid in t]

    def uses_edge_kind(self, *kinds: str) -> bool:
        return any(self.graph.edge(a, b).kind in kinds for t in self.trees for a, b in t.edges)

    def validate(self, roots: Optional[Sequence[int]] = None) -> "TreeCover":
        """Check every tree and the full-cover condition; return self"""
        if roots is not None:
            if len(roots) != len(self.trees):
                raise IntegrityError(f"{len(self.trees)} trees for {len(roots)} robots")
            for i, (tree, root) in enumerate(zip(self.trees, roots)):
                if tree.root != root:
                    raise IntegrityError(f"tree {i} is rooted at {tree.root}, expected {root}")
        for tree in self.trees:
            tree.check(self.graph)
        missing = set(self.graph.vertex_ids) - set(self.occurrences())
        if missing:
            raise IntegrityError(f"isovertices not covered by any tree: {sorted(missing)}")
        return self

    def replace(self, trees: List[Tree], graph: Optional[Isograph] = None) -> "TreeCover":
        return TreeCover(list(trees), graph if graph is not None else self.graph, self.status)

    def to_dict(self) -> Dict:
        return {
            "status": self.status,
            "makespan": self.makespan,
            "costs": list(self.costs),
            "trees": [t.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, data: Dict, graph: Isograph) -> "TreeCover":
        return cls([Tree.from_dict(t) for t in data["trees"]], graph, data.get("status"))
