"""
Tests for the min-max rooted tree cover: model, warm start and solvers

The exhaustive oracle enumerates, per robot, every connected vertex set
containing its root (cost = vertex weights + minimum spanning edge weights)
and takes the best combination that covers all vertices.
"""

import itertools
import math
import time

import networkx as nx
import numpy as np
import pytest

from mcfs.exceptions import InfeasibleInstanceError, IntegrityError
from mcfs.geometry.isolines import Isoline
from mcfs.geometry.shapes import circle_ring
from mcfs.isograph import IsoEdge, Isograph, Isovertex, StitchingTuple
from mcfs.mmrtc import (
    MmrtcInstance,
    Tree,
    TreeCover,
    build_model,
    cover_to_assignment,
    decode,
    edge_flows,
    parse_backend,
    read_solution,
    solve,
    solve_instance,
    spanning_forest,
    warm_start,
)
from mcfs.mmrtc.model import CONSTRAINT_GROUPS


def make_graph(nx_graph, weights, augmented=None):
    """Isograph with the topology of ``nx_graph``; ``augmented`` maps extra edges to weights"""
    vertices = []
    for v in sorted(nx_graph.nodes):
        ring = circle_ring(1.0 + v, n=int(weights[v]))
        vertices.append(Isovertex(int(v), Isoline(layer=1, points=ring, spacing=0.1)))
    edges = [IsoEdge(int(a), int(b), [StitchingTuple(0, 0, int(a), int(b))]) for a, b in nx_graph.edges]
    for (a, b), w in (augmented or {}).items():
        edges.append(IsoEdge(a, b, [StitchingTuple(0, 0, a, b)], "augmented", float(w)))
    return Isograph(vertices, edges, 0.1)


def oracle_makespan(g, roots):
    full = nx.Graph()
    full.add_nodes_from(g.vertex_ids)
    for e in g.edges:
        full.add_edge(e.u, e.v, weight=e.weight)
    ids = g.vertex_ids
    all_mask = (1 << len(ids)) - 1

    def options(root):
        found = []
        others = [v for v in ids if v != root]
        for r in range(len(others) + 1):
            for extra in itertools.combinations(others, r):
                members = (root,) + extra
                sub = full.subgraph(members)
                if not nx.is_connected(sub):
                    continue
                mst = nx.minimum_spanning_tree(sub)
                cost = sum(g.weight(v) for v in members) + sum(d["weight"] for _, _, d in mst.edges(data=True))
                found.append((sum(1 << ids.index(v) for v in members), cost))
        return found

    per_robot = [options(r) for r in roots]
    best = math.inf
    for combo in itertools.product(*per_robot):
        mask = 0
        for m, _ in combo:
            mask |= m
        if mask == all_mask:
            best = min(best, max(c for _, c in combo))
    return best


def _weights(rng, n):
    return {v: int(rng.integers(3, 13)) for v in range(n)}


# -- instance and trees ------------------------------------------------


def test_path_tree_cost():
    g = make_graph(nx.path_graph(3), {0: 10, 1: 4, 2: 10})
    tree = Tree.of(0, [0, 1, 2], [(0, 1), (1, 2)])
    assert tree.cost(g) == 24
    assert Tree.of(1, [1]).cost(g) == 4
    assert tree.leaves() == [0, 2]


def test_tree_check_rejects_cycles():
    g = make_graph(nx.cycle_graph(3), {0: 3, 1: 3, 2: 3})
    with pytest.raises(IntegrityError):
        Tree.of(0, [0, 1, 2], [(0, 1), (1, 2), (0, 2)]).check(g)
    with pytest.raises(IntegrityError):
        Tree.of(0, [0, 1, 2], [(0, 1)]).check(g)
    Tree.of(0, [0, 1, 2], [(0, 1), (0, 2)]).check(g)


def test_instance_rejects_unknown_root():
    g = make_graph(nx.path_graph(3), {0: 3, 1: 3, 2: 3})
    with pytest.raises(ValueError):
        MmrtcInstance(g, [5])
    with pytest.raises(ValueError):
        MmrtcInstance(g, [])


def test_cover_serialization():
    g = make_graph(nx.path_graph(4), {0: 3, 1: 4, 2: 5, 3: 6})
    cover = TreeCover([Tree.of(0, [0, 1], [(0, 1)]), Tree.of(3, [2, 3], [(2, 3)])], g, "optimal").validate([0, 3])
    restored = TreeCover.from_dict(cover.to_dict(), g)
    assert restored.trees == cover.trees
    assert restored.makespan == cover.makespan == 11


# -- model -------------------------------------------------------------


def test_model_constraint_groups():
    g = make_graph(nx.cycle_graph(4), {0: 3, 1: 4, 2: 5, 3: 6})
    inst = MmrtcInstance(g, [0, 2])
    model = build_model(inst)
    k, n, m = 2, 4, 4
    counts = {group: len(model.rows_of(group)) for group in CONSTRAINT_GROUPS}
    assert counts == {
        "makespan": k, "cover": n, "rooted": k, "tree": k,
        "flow": k * m, "capacity": k * n, "link": 2 * k * m,
    }
    assert model.n_variables == k * (m + n + 2 * m) + 1
    a, lb, ub = model.matrix()
    assert a.shape == (len(model.rows), model.n_variables)
    assert np.all(lb <= ub)
    capacity = model.rows_of("capacity")[0]
    assert capacity.upper == pytest.approx(1 - 1 / n)


def test_model_evaluates_warm_start():
    g = make_graph(nx.path_graph(5), {0: 3, 1: 4, 2: 5, 3: 6, 4: 7})
    inst = MmrtcInstance(g, [0, 4])
    cover = warm_start(inst)
    tau, violations = build_model(inst).evaluate(*cover_to_assignment(cover))
    assert violations == []
    assert tau == cover.makespan


def test_model_flags_cycle():
    g = make_graph(nx.cycle_graph(3), {0: 3, 1: 3, 2: 3})
    inst = MmrtcInstance(g, [0])
    x = {(0, (0, 1)): 1, (0, (1, 2)): 1, (0, (0, 2)): 1}
    y = {(0, 0): 1, (0, 1): 1, (0, 2): 1}
    _, violations = build_model(inst).evaluate(x, y)
    assert "tree_0" in violations and "flow_0" in violations
    with pytest.raises(IntegrityError):
        decode(x, y, inst)


def test_edge_flows():
    assert edge_flows([(0, 1), (1, 2)], 3) is not None
    assert edge_flows([(0, 1), (1, 2), (0, 2)], 3) is None


def test_lp_export(tmp_path):
    g = make_graph(nx.path_graph(3), {0: 3, 1: 4, 2: 5}, augmented={(0, 2): 0.2})
    model = build_model(MmrtcInstance(g, [0]))
    text = model.to_lp()
    for section in ("Minimize", "Subject To", "Bounds", "Binaries", "End"):
        assert section in text
    assert "makespan_0:" in text
    assert "0.2 x_0_0_2" in text, "augmented edge weights enter the makespan row"
    assert "x_0_0_1" in text and "y_0_2" in text and "fu_0_0_1" in text
    path = tmp_path / "model.lp"
    model.write_lp(path)
    assert path.read_text() == text


# -- warm start --------------------------------------------------------


def test_warm_start_is_feasible():
    g = make_graph(nx.path_graph(6), {v: 3 + v for v in range(6)}, augmented={(0, 2): 0.2})
    inst = MmrtcInstance(g, [0, 5])
    forest = spanning_forest(inst)
    assert sorted(forest.edges) == [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)], "augmented edges stay out"
    cover = warm_start(inst)
    assert cover.trees[0].vertices == (0, 1, 2)
    assert cover.trees[1].vertices == (3, 4, 5)


def test_warm_start_shared_root_duplicates_path():
    g = make_graph(nx.star_graph(3), {0: 5, 1: 3, 2: 3, 3: 3})
    cover = warm_start(MmrtcInstance(g, [0, 0]))
    assert cover.trees[0].vertices == (0, 1, 2, 3), "hop ties go to the lowest robot index"
    assert cover.trees[1].vertices == (0,)


def test_unreachable_vertex_is_infeasible():
    graph = nx.Graph()
    graph.add_edge(0, 1)
    graph.add_node(2)
    g = make_graph(graph, {0: 3, 1: 3, 2: 3})
    inst = MmrtcInstance(g, [0])
    with pytest.raises(InfeasibleInstanceError):
        warm_start(inst)
    assert solve(build_model(inst)).status == "infeasible"


# -- solvers -----------------------------------------------------------


def test_parse_backend():
    assert parse_backend("bundled") == ("bundled", None)
    assert parse_backend("external:cbc -x") == ("external", "cbc -x")
    with pytest.raises(ValueError):
        parse_backend("gurobi")
    with pytest.raises(ValueError):
        parse_backend("external:")


def test_zero_time_limit_returns_warm_start():
    g = make_graph(nx.path_graph(5), {v: 3 + v for v in range(5)})
    inst = MmrtcInstance(g, [0, 0])
    result = solve(build_model(inst), time_limit=0)
    assert result.status == "feasible"
    assert result.makespan == warm_start(inst).makespan


def test_bundled_solver_matches_oracle_on_all_small_graphs():
    print("\n" + "=" * 70)
    print("BUNDLED BRANCH-AND-BOUND VS EXHAUSTIVE ORACLE")
    print("=" * 70)
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    graphs = [g for g in nx.graph_atlas_g() if 2 <= g.number_of_nodes() <= 7 and nx.is_connected(g)]

    checked = 0
    for index, topology in enumerate(graphs):
        n = topology.number_of_nodes()
        g = make_graph(topology, _weights(rng, n))
        root_sets = [[0], [0, n - 1] if index % 2 == 0 else [int(rng.integers(n))] * 2]
        for roots in root_sets:
            result = solve_instance(MmrtcInstance(g, roots), time_limit=60)
            expected = oracle_makespan(g, roots)
            assert result.status == "optimal"
            assert result.makespan == expected, f"graph {index} roots {roots}: {result.makespan} != {expected}"
            result.cover.validate(roots)
            checked += 1

    print(f"  {checked} instances in {time.perf_counter() - start:.1f}s")
    assert checked == 2 * len(graphs)
    assert sum(1 for g in graphs if g.number_of_nodes() == 7) == 853, "every connected 7-vertex graph is swept"


def test_bundled_solver_matches_oracle_with_three_robots():
    rng = np.random.default_rng(7)
    for trial in range(50):
        n = int(rng.integers(3, 7))
        topology = nx.random_labeled_tree(n, seed=int(rng.integers(1 << 30))) if hasattr(nx, "random_labeled_tree") \
            else nx.random_tree(n, seed=int(rng.integers(1 << 30)))
        augmented = {}
        for a, b in itertools.combinations(range(n), 2):
            if not topology.has_edge(a, b) and rng.random() < 0.3:
                if rng.random() < 0.5:
                    topology.add_edge(a, b)
                else:
                    augmented[(a, b)] = 0.1 * int(rng.integers(2, 5))
        g = make_graph(topology, _weights(rng, n), augmented)
        roots = [int(r) for r in rng.integers(0, n, size=3)]
        result = solve_instance(MmrtcInstance(g, roots), time_limit=60)
        assert result.status == "optimal"
        assert result.makespan == pytest.approx(oracle_makespan(g, roots), abs=1e-9), f"trial {trial}"


def test_solver_never_worse_than_warm_start():
    rng = np.random.default_rng(3)
    topology = nx.convert_node_labels_to_integers(nx.grid_2d_graph(3, 3))
    g = make_graph(topology, _weights(rng, 9))
    inst = MmrtcInstance(g, [0, 8, 4])
    warm = warm_start(inst)
    result = solve(build_model(inst), warm, time_limit=60, node_limit=5)
    assert result.makespan <= warm.makespan
    assert result.lower_bound <= result.makespan + 1e-9
    assert [h[1] for h in result.history] == sorted((h[1] for h in result.history), reverse=True)


def test_highs_backend_matches_oracle():
    rng = np.random.default_rng(11)
    for n, roots in ((4, [0, 3]), (5, [0, 0]), (6, [1, 4])):
        topology = nx.cycle_graph(n)
        topology.add_edge(0, n // 2)
        g = make_graph(topology, _weights(rng, n))
        result = solve_instance(MmrtcInstance(g, roots), time_limit=60, backend="highs")
        assert result.backend == "highs"
        assert result.makespan == pytest.approx(oracle_makespan(g, roots))


def test_external_backend_reads_solution_file(tmp_path):
    g = make_graph(nx.path_graph(4), {0: 3, 1: 4, 2: 5, 3: 6})
    inst = MmrtcInstance(g, [0, 3])
    target = TreeCover([Tree.of(0, [0, 1], [(0, 1)]), Tree.of(3, [2, 3], [(2, 3)])], g)
    x, y = cover_to_assignment(target)
    lines = ["# written by a test"]
    lines += [f"x_{i}_{e[0]}_{e[1]} 1" for (i, e) in x]
    lines += [f"y_{i}_{v} 1" for (i, v) in y]
    lines += ["tau 11"]
    prepared = tmp_path / "prepared.txt"
    prepared.write_text("\n".join(lines) + "\n")
    assert read_solution(prepared)["tau"] == 11.0

    result = solve(build_model(inst), time_limit=30, backend=f"external:cp {prepared} {{solution}}")
    assert result.backend == "external"
    assert result.status == "feasible"
    assert [t.vertices for t in result.cover.trees] == [(0, 1), (2, 3)]


def test_external_backend_failure_keeps_warm_start():
    g = make_graph(nx.path_graph(4), {0: 3, 1: 4, 2: 5, 3: 6})
    inst = MmrtcInstance(g, [0, 3])
    result = solve(build_model(inst), time_limit=5, backend="external:/nonexistent/mip-solver")
    assert result.status == "feasible"
    assert result.makespan == warm_start(inst).makespan
