"""
Isograph: isolines as vertices, stitchable adjacency as edges

Edge tuples are stored oriented from the lower vertex id (p_index on u,
q_index on v with u < v); ``Isograph.tuples(a, b)`` returns them oriented
from ``a``. Edge kinds:

    original      adjacent layers, nonempty mutual-nearest tuple set
    augmented     graph distance 2..delta, tuples chained along a shortest path
    bridge        joins two components of a disconnected isograph
    nonadjacent   split-vertex edge whose restricted tuple set came out empty;
                  realized with the closest point pair
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ..geometry.isolines import Isoline
from ..geometry.workspace import Workspace, ring_perimeter
from .tuples import StitchingTuple, closest_pair, stitching_tuples

logger = logging.getLogger(__name__)

EDGE_KINDS = ("original", "augmented", "bridge", "nonadjacent")


@dataclass(eq=False)
class Isovertex:
    """
    Vertex carrying one isoline; weight w_v is its point count

    ``sources`` maps each loop point to the original (vertex id, point index)
    it came from; it is None for vertices built straight from isolines.
    """

    id: int
    isoline: Isoline
    sources: Optional[np.ndarray] = None
    split_from: Optional[Tuple[int, int]] = None

    @property
    def weight(self) -> int:
        return len(self.isoline.points)

    @property
    def layer(self) -> int:
        return self.isoline.layer

    @property
    def points(self) -> np.ndarray:
        return self.isoline.points

    @property
    def is_split(self) -> bool:
        return self.split_from is not None

    def source_of(self, index: int) -> Tuple[int, int]:
        if self.sources is None:
            return (self.id, int(index))
        vid, idx = self.sources[index]
        return (int(vid), int(idx))

    def source_list(self) -> List[Tuple[int, int]]:
        return [self.source_of(i) for i in range(self.weight)]


@dataclass(eq=False)
class IsoEdge:
    u: int
    v: int
    tuples: List[StitchingTuple]
    kind: str = "original"
    weight: float = 0.0                     # w_e, length units
    via_path: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        if self.u == self.v:
            raise ValueError(f"self-loop on isovertex {self.u}")
        if self.kind not in EDGE_KINDS:
            raise ValueError(f"Unknown edge kind: {self.kind}")
        if self.u > self.v:
            self.u, self.v = self.v, self.u
            self.tuples = [t.reversed() for t in self.tuples]
            if self.via_path is not None:
                self.via_path = tuple(reversed(self.via_path))
        self.tuples = sorted(self.tuples)
        if not self.tuples:
            raise ValueError(f"edge ({self.u}, {self.v}) has no stitching tuple")

    @property
    def key(self) -> Tuple[int, int]:
        return (self.u, self.v)


def edge_key(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass(eq=False)
class Isograph:
    """Undirected simple graph over isovertices"""

    vertices: List[Isovertex]
    edges: List[IsoEdge]
    step: float                             # isoline step l
    workspace: Optional[Workspace] = None
    _vertex_index: Dict[int, Isovertex] = field(init=False, repr=False)
    _edge_index: Dict[Tuple[int, int], IsoEdge] = field(init=False, repr=False)

    def __post_init__(self):
        self.vertices = sorted(self.vertices, key=lambda vx: vx.id)
        self.edges = sorted(self.edges, key=lambda e: e.key)
        self._vertex_index = {vx.id: vx for vx in self.vertices}
        if len(self._vertex_index) != len(self.vertices):
            raise ValueError("duplicate isovertex ids")
        self._edge_index = {}
        for edge in self.edges:
            if edge.key in self._edge_index:
                raise ValueError(f"duplicate edge {edge.key}")
            if edge.u not in self._vertex_index or edge.v not in self._vertex_index:
                raise ValueError(f"edge {edge.key} references an unknown isovertex")
            self._edge_index[edge.key] = edge
        self.graph = nx.Graph()
        self.graph.add_nodes_from(self._vertex_index)
        for edge in self.edges:
            self.graph.add_edge(edge.u, edge.v, weight=edge.weight, kind=edge.kind)

    # -- lookups -------------------------------------------------------

    @property
    def vertex_ids(self) -> List[int]:
        return [vx.id for vx in self.vertices]

    def vertex(self, vid: int) -> Isovertex:
        return self._vertex_index[vid]

    def __contains__(self, vid: int) -> bool:
        return vid in self._vertex_index

    def weight(self, vid: int) -> int:
        return self._vertex_index[vid].weight

    def edge(self, a: int, b: int) -> Optional[IsoEdge]:
        return self._edge_index.get(edge_key(a, b))

    def has_edge(self, a: int, b: int) -> bool:
        return edge_key(a, b) in self._edge_index

    def neighbors(self, vid: int) -> List[int]:
        return sorted(self.graph.neighbors(vid))

    def tuples(self, a: int, b: int) -> List[StitchingTuple]:
        """Tuples of edge (a, b) oriented so p_index lies on I_a"""
        edge = self._edge_index[edge_key(a, b)]
        if edge.u == a:
            return list(edge.tuples)
        return sorted(t.reversed() for t in edge.tuples)

    def edges_of_kind(self, *kinds: str) -> List[IsoEdge]:
        return [e for e in self.edges if e.kind in kinds]

    @property
    def connected(self) -> bool:
        return len(self.vertices) > 0 and nx.is_connected(self.graph)

    def components(self) -> List[List[int]]:
        comps = [sorted(c) for c in nx.connected_components(self.graph)]
        return sorted(comps, key=lambda c: c[0])

    def base_graph(self) -> nx.Graph:
        """Subgraph without augmented edges"""
        base = nx.Graph()
        base.add_nodes_from(self._vertex_index)
        for edge in self.edges:
            if edge.kind != "augmented":
                base.add_edge(edge.u, edge.v)
        return base

    def centroid(self, vid: int) -> np.ndarray:
        return self._vertex_index[vid].isoline.centroid

    def total_weight(self) -> int:
        return sum(vx.weight for vx in self.vertices)

    def with_edges(self, extra: Iterable[IsoEdge]) -> "Isograph":
        return Isograph(self.vertices, self.edges + list(extra), self.step, self.workspace)

    # -- serialization -------------------------------------------------

    def to_dict(self) -> Dict:
        vertices = []
        for vx in self.vertices:
            entry = {
                "id": vx.id,
                "layer": vx.layer,
                "weight": vx.weight,
                "points": vx.points.tolist(),
            }
            if vx.sources is not None:
                entry["sources"] = vx.sources.tolist()
                entry["split_from"] = list(vx.split_from)
            vertices.append(entry)
        edges = [
            {
                "u": e.u,
                "v": e.v,
                "kind": e.kind,
                "weight": e.weight,
                "n_tuples": len(e.tuples),
                "tuples": [[t.p_index, t.q_index] for t in e.tuples],
                "via_path": list(e.via_path) if e.via_path is not None else None,
            }
            for e in self.edges
        ]
        return {"step": self.step, "connected": self.connected, "vertices": vertices, "edges": edges}

    @classmethod
    def from_dict(cls, data: Dict, workspace: Optional[Workspace] = None) -> "Isograph":
        vertices = []
        for entry in data["vertices"]:
            points = np.asarray(entry["points"], dtype=float)
            isoline = Isoline(layer=int(entry["layer"]), points=points, spacing=ring_perimeter(points) / len(points))
            sources = entry.get("sources")
            split_from = entry.get("split_from")
            vertices.append(Isovertex(
                id=int(entry["id"]),
                isoline=isoline,
                sources=np.asarray(sources, dtype=int) if sources is not None else None,
                split_from=tuple(split_from) if split_from is not None else None,
            ))
        edges = []
        for entry in data["edges"]:
            u, v = int(entry["u"]), int(entry["v"])
            tuples = [StitchingTuple(int(p), int(q), u, v) for p, q in entry["tuples"]]
            via = entry.get("via_path")
            edges.append(IsoEdge(u, v, tuples, entry.get("kind", "original"), float(entry.get("weight", 0.0)),
                                 tuple(via) if via is not None else None))
        return cls(vertices, edges, float(data["step"]), workspace)


def build_isograph(
    isolines: Sequence[Isoline],
    step: float,
    workspace: Optional[Workspace] = None,
    bridge: bool = False
) -> Isograph:
    """
    One isovertex per isoline, one original edge per adjacent-layer pair with
    a nonempty stitching-tuple set

    Vertex ids follow (layer, lexicographic first point). A disconnected
    result is returned as is (``connected`` is False) unless ``bridge`` is set.
    """
    ordered = sorted(isolines, key=lambda iso: (iso.layer, float(iso.points[0, 0]), float(iso.points[0, 1])))
    vertices = [Isovertex(id=i, isoline=iso) for i, iso in enumerate(ordered)]

    by_layer: Dict[int, List[Isovertex]] = {}
    for vx in vertices:
        by_layer.setdefault(vx.layer, []).append(vx)

    cache = {}
    edges = []
    for layer in sorted(by_layer):
        for u in by_layer[layer]:
            for v in by_layer.get(layer + 1, []):
                tuples = stitching_tuples(u, v, vertices, cache)
                if tuples:
                    edges.append(IsoEdge(u.id, v.id, tuples, "original", 0.0))

    graph = Isograph(vertices, edges, float(step), workspace)
    if not graph.connected:
        logger.warning("Isograph has %d components", len(graph.components()))
        if bridge:
            graph = bridge_components(graph)
    logger.info("Isograph: %d vertices, %d edges, connected=%s", len(graph.vertices), len(graph.edges), graph.connected)
    return graph


def bridge_components(g: Isograph) -> Isograph:
    """
    Join components with bridge edges until the isograph is connected

    The component holding the lowest vertex id is joined to whichever other
    component has the closest same-layer isoline pair (any layer if no layer
    is shared). The bridge carries that closest point pair as its only tuple
    and weighs the pair distance.
    """
    while not g.connected and len(g.vertices) > 1:
        components = g.components()
        first = components[0]
        best = None
        for other in components[1:]:
            pairs = [(a, b) for a in first for b in other if g.vertex(a).layer == g.vertex(b).layer]
            if not pairs:
                pairs = [(a, b) for a in first for b in other]
            for a, b in pairs:
                p, q, dist = closest_pair(g.vertex(a).points, g.vertex(b).points)
                candidate = (dist, a, b, p, q)
                if best is None or candidate < best:
                    best = candidate
        dist, a, b, p, q = best
        bridge = IsoEdge(a, b, [StitchingTuple(p, q, a, b)], "bridge", dist)
        logger.info("Bridging isovertices %d and %d (distance %.4f)", a, b, dist)
        g = g.with_edges([bridge])
    return g
