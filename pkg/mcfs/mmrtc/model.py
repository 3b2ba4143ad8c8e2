"""
Mixed-integer model of the min-max rooted tree cover

Variables per robot i:
    x[i, e]        binary, edge e in tree i
    y[i, v]        binary, vertex v in tree i
    fu[i, e]       continuous >= 0, flow of edge e=(u, v) sent to u
    fv[i, e]       continuous >= 0, flow of edge e sent to v
plus the continuous makespan tau.

Constraint groups:
    makespan   sum_v w_v y[i, v] + sum_e w_e x[i, e] <= tau
    cover      sum_i y[i, v] >= 1
    rooted     y[i, r_i] = 1
    tree       sum_v y[i, v] = 1 + sum_e x[i, e]
    flow       fu[i, e] + fv[i, e] = x[i, e]
    capacity   sum of flows into v <= 1 - 1/|V|
    link       x[i, e] <= y[i, u], x[i, e] <= y[i, v]

Each selected edge must push one unit of flow into its endpoints while no
vertex absorbs a full unit, which is only possible when the selected edges
form a forest. Together with the tree equation this leaves exactly the
trees containing the root.
"""

import io
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np
from scipy import sparse

from ..isograph.graph import edge_key
from .instance import MmrtcInstance, TreeCover

logger = logging.getLogger(__name__)

CONSTRAINT_GROUPS = ("makespan", "cover", "rooted", "tree", "flow", "capacity", "link")

EdgeKey = Tuple[int, int]
EdgeAssignment = Dict[Tuple[int, EdgeKey], int]
VertexAssignment = Dict[Tuple[int, int], int]


@dataclass
class Row:
    name: str
    group: str
    coeffs: Dict[int, float]
    lower: float = -math.inf
    upper: float = math.inf


@dataclass(eq=False)
class MipModel:
    instance: MmrtcInstance
    names: List[str] = field(default_factory=list)
    integral: List[bool] = field(default_factory=list)
    upper_bounds: List[float] = field(default_factory=list)
    rows: List[Row] = field(default_factory=list)
    index: Dict[str, int] = field(default_factory=dict)

    def add_variable(self, name: str, binary: bool, upper: float = math.inf) -> int:
        self.index[name] = len(self.names)
        self.names.append(name)
        self.integral.append(binary)
        self.upper_bounds.append(1.0 if binary else upper)
        return self.index[name]

    @property
    def n_variables(self) -> int:
        return len(self.names)

    @property
    def tau(self) -> int:
        return self.index["tau"]

    def x(self, i: int, e: EdgeKey) -> int:
        return self.index[x_name(i, e)]

    def y(self, i: int, v: int) -> int:
        return self.index[y_name(i, v)]

    def rows_of(self, group: str) -> List[Row]:
        return [r for r in self.rows if r.group == group]

    # -- solver views --------------------------------------------------

    def objective(self) -> np.ndarray:
        c = np.zeros(self.n_variables)
        c[self.tau] = 1.0
        return c

    def matrix(self) -> Tuple[sparse.csr_matrix, np.ndarray, np.ndarray]:
        """Constraint matrix with row bounds (lb <= A z <= ub)"""
        data, rows, cols = [], [], []
        for r, row in enumerate(self.rows):
            for col, coeff in row.coeffs.items():
                rows.append(r)
                cols.append(col)
                data.append(coeff)
        a = sparse.csr_matrix((data, (rows, cols)), shape=(len(self.rows), self.n_variables))
        lb = np.array([row.lower for row in self.rows])
        ub = np.array([row.upper for row in self.rows])
        return a, lb, ub

    def to_lp(self) -> str:
        """Model in LP text format"""
        out = io.StringIO()
        out.write("\\ min-max rooted tree cover\n")
        out.write("Minimize\n obj: tau\nSubject To\n")
        for row in self.rows:
            expr = _lp_expression(row.coeffs, self.names)
            if row.lower == row.upper:
                out.write(f" {row.name}: {expr} = {_lp_number(row.upper)}\n")
            else:
                if math.isfinite(row.lower):
                    out.write(f" {row.name}: {expr} >= {_lp_number(row.lower)}\n")
                if math.isfinite(row.upper):
                    suffix = "_ub" if math.isfinite(row.lower) else ""
                    out.write(f" {row.name}{suffix}: {expr} <= {_lp_number(row.upper)}\n")
        out.write("Bounds\n")
        for name, binary, upper in zip(self.names, self.integral, self.upper_bounds):
            if not binary:
                if math.isfinite(upper):
                    out.write(f" 0 <= {name} <= {_lp_number(upper)}\n")
                else:
                    out.write(f" {name} >= 0\n")
        out.write("Binaries\n")
        binaries = [n for n, b in zip(self.names, self.integral) if b]
        for start in range(0, len(binaries), 8):
            out.write(" " + " ".join(binaries[start:start + 8]) + "\n")
        out.write("End\n")
        return out.getvalue()

    def write_lp(self, path) -> None:
        with open(path, "w") as f:
            f.write(self.to_lp())

    # -- checking ------------------------------------------------------

    def evaluate(self, x: EdgeAssignment, y: VertexAssignment) -> Tuple[float, List[str]]:
        """
        Check a binary assignment against every constraint group

        Flows are not part of the input: the flow and capacity groups hold
        iff a feasible flow exists, which is decided with a max-flow per robot.

        Returns:
            (tau implied by the assignment, names of violated constraints)
        """
        inst = self.instance
        g = inst.graph
        violations = []
        loads = []
        for i in range(inst.k):
            load = sum(g.weight(v) * y.get((i, v), 0) for v in g.vertex_ids)
            load += sum(e.weight * x.get((i, e.key), 0) for e in g.edges)
            loads.append(load)
            if y.get((i, inst.roots[i]), 0) != 1:
                violations.append(f"rooted_{i}")
            n_vertices = sum(y.get((i, v), 0) for v in g.vertex_ids)
            selected = [e.key for e in g.edges if x.get((i, e.key), 0) == 1]
            if n_vertices != 1 + len(selected):
                violations.append(f"tree_{i}")
            for a, b in selected:
                if y.get((i, a), 0) != 1 or y.get((i, b), 0) != 1:
                    violations.append(f"link_{i}_{a}_{b}")
            if selected and edge_flows(selected, len(g.vertices)) is None:
                violations.append(f"flow_{i}")
        for v in g.vertex_ids:
            if sum(y.get((i, v), 0) for i in range(inst.k)) < 1:
                violations.append(f"cover_{v}")
        return (max(loads) if loads else 0.0), violations


def x_name(i: int, e: EdgeKey) -> str:
    return f"x_{i}_{e[0]}_{e[1]}"


def y_name(i: int, v: int) -> str:
    return f"y_{i}_{v}"


def _lp_number(value: float) -> str:
    return repr(float(value)) if not float(value).is_integer() else str(int(value))


def _lp_expression(coeffs: Dict[int, float], names: List[str]) -> str:
    terms = []
    for col in sorted(coeffs):
        coeff = coeffs[col]
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        term = names[col] if magnitude == 1 else f"{_lp_number(magnitude)} {names[col]}"
        terms.append(f"{sign} {term}")
    # LP readers cap line length; wrap every 8 terms
    text = "\n  ".join(" ".join(terms[s:s + 8]) for s in range(0, len(terms), 8))
    return text[2:] if text.startswith("+ ") else text


def edge_flows(edges: List[EdgeKey], n_vertices: int) -> Optional[Dict[EdgeKey, Tuple[float, float]]]:
    """
    Flows (to first endpoint, to second endpoint) satisfying the flow and
    capacity constraints for the selected edges, or None when none exist
    """
    capacity = 1.0 - 1.0 / n_vertices
    net = nx.DiGraph()
    for e in edges:
        net.add_edge("source", ("e", e), capacity=1.0)
        net.add_edge(("e", e), ("v", e[0]))
        net.add_edge(("e", e), ("v", e[1]))
    for vid in {v for e in edges for v in e}:
        net.add_edge(("v", vid), "sink", capacity=capacity)
    value, flow = nx.maximum_flow(net, "source", "sink")
    if value < len(edges) - 1e-9:
        return None
    return {e: (flow[("e", e)][("v", e[0])], flow[("e", e)][("v", e[1])]) for e in edges}


def build_model(inst: MmrtcInstance) -> MipModel:
    """Encode the instance; augmented and bridge edge weights enter the makespan rows"""
    g = inst.graph
    model = MipModel(inst)
    edges = [e.key for e in g.edges]
    n = len(g.vertices)

    for i in range(inst.k):
        for e in edges:
            model.add_variable(x_name(i, e), binary=True)
        for v in g.vertex_ids:
            model.add_variable(y_name(i, v), binary=True)
        for e in edges:
            model.add_variable(f"fu_{i}_{e[0]}_{e[1]}", binary=False)
            model.add_variable(f"fv_{i}_{e[0]}_{e[1]}", binary=False)
    tau = model.add_variable("tau", binary=False)

    for i in range(inst.k):
        coeffs = {model.y(i, v): float(g.weight(v)) for v in g.vertex_ids}
        for e in g.edges:
            if e.weight:
                coeffs[model.x(i, e.key)] = float(e.weight)
        coeffs[tau] = -1.0
        model.rows.append(Row(f"makespan_{i}", "makespan", coeffs, upper=0.0))

    for v in g.vertex_ids:
        coeffs = {model.y(i, v): 1.0 for i in range(inst.k)}
        model.rows.append(Row(f"cover_{v}", "cover", coeffs, lower=1.0))

    for i, root in enumerate(inst.roots):
        model.rows.append(Row(f"rooted_{i}", "rooted", {model.y(i, root): 1.0}, 1.0, 1.0))

    for i in range(inst.k):
        coeffs = {model.y(i, v): 1.0 for v in g.vertex_ids}
        for e in edges:
            coeffs[model.x(i, e)] = -1.0
        model.rows.append(Row(f"tree_{i}", "tree", coeffs, 1.0, 1.0))

    for i in range(inst.k):
        inflow: Dict[int, Dict[int, float]] = {v: {} for v in g.vertex_ids}
        for e in edges:
            fu = model.index[f"fu_{i}_{e[0]}_{e[1]}"]
            fv = model.index[f"fv_{i}_{e[0]}_{e[1]}"]
            xe = model.x(i, e)
            model.rows.append(Row(f"flow_{i}_{e[0]}_{e[1]}", "flow", {fu: 1.0, fv: 1.0, xe: -1.0}, 0.0, 0.0))
            inflow[e[0]][fu] = 1.0
            inflow[e[1]][fv] = 1.0
            model.rows.append(Row(f"link_{i}_{e[0]}_{e[1]}_a", "link", {xe: 1.0, model.y(i, e[0]): -1.0}, upper=0.0))
            model.rows.append(Row(f"link_{i}_{e[0]}_{e[1]}_b", "link", {xe: 1.0, model.y(i, e[1]): -1.0}, upper=0.0))
        for v in g.vertex_ids:
            if inflow[v]:
                model.rows.append(Row(f"capacity_{i}_{v}", "capacity", inflow[v], upper=1.0 - 1.0 / n))

    logger.debug("MIP model: %d variables, %d constraints", model.n_variables, len(model.rows))
    return model


def cover_to_assignment(cover: TreeCover) -> Tuple[EdgeAssignment, VertexAssignment]:
    x: EdgeAssignment = {}
    y: VertexAssignment = {}
    for i, tree in enumerate(cover.trees):
        for v in tree.vertices:
            y[(i, v)] = 1
        for e in tree.edges:
            x[(i, edge_key(*e))] = 1
    return x, y
