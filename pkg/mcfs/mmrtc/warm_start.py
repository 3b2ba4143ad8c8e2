"""
MST-based initial tree cover
"""

import logging
from typing import Dict, List, Set, Tuple

import networkx as nx
from networkx.utils import UnionFind

from ..exceptions import InfeasibleInstanceError
from .instance import MmrtcInstance, Tree, TreeCover

logger = logging.getLogger(__name__)


def spanning_forest(inst: MmrtcInstance) -> nx.Graph:
    """Kruskal over the non-augmented edges; ties broken by ascending endpoint ids"""
    g = inst.graph
    forest = nx.Graph()
    forest.add_nodes_from(g.vertex_ids)
    components = UnionFind(g.vertex_ids)
    for edge in sorted(g.edges, key=lambda e: (e.weight, e.u, e.v)):
        if edge.kind == "augmented":
            continue
        if components[edge.u] != components[edge.v]:
            components.union(edge.u, edge.v)
            forest.add_edge(edge.u, edge.v)
    return forest


def warm_start(inst: MmrtcInstance) -> TreeCover:
    """
    Feasible cover from the minimum spanning forest

    Every vertex goes to the robot whose root is the fewest forest hops away
    (lowest robot index on ties). Each tree is the union of forest paths from
    its root to its assigned vertices, so vertices on those paths that belong
    to another robot appear in both trees.

    Raises:
        InfeasibleInstanceError: some vertex shares a component with no root
    """
    forest = spanning_forest(inst)
    hops = [nx.single_source_shortest_path_length(forest, r) for r in inst.roots]

    assigned: Dict[int, List[int]] = {i: [] for i in range(inst.k)}
    unreachable = []
    for v in inst.graph.vertex_ids:
        options = [(h[v], i) for i, h in enumerate(hops) if v in h]
        if not options:
            unreachable.append(v)
            continue
        assigned[min(options)[1]].append(v)
    if unreachable:
        raise InfeasibleInstanceError(f"isovertices unreachable from every root: {unreachable}", stage="mmrtc")

    trees = []
    for i, root in enumerate(inst.roots):
        paths = nx.single_source_shortest_path(forest, root)
        vertices: Set[int] = {root}
        edges: Set[Tuple[int, int]] = set()
        for v in assigned[i]:
            path = paths[v]
            vertices.update(path)
            edges.update(zip(path, path[1:]))
        trees.append(Tree.of(root, vertices, edges))

    cover = TreeCover(trees, inst.graph, status="feasible").validate(inst.roots)
    logger.info("Warm start: makespan %.2f, costs %s", cover.makespan, [round(c, 2) for c in cover.costs])
    return cover
