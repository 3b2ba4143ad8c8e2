"""
Min-max rooted tree cover: model, warm start and solver backends
"""

from .instance import MmrtcInstance, Tree, TreeCover
from .model import MipModel, build_model, cover_to_assignment, edge_flows
from .warm_start import spanning_forest, warm_start
from .solver import BranchAndBound, SolveResult, decode, parse_backend, read_solution, solve, solve_instance

__all__ = [
    "MmrtcInstance",
    "Tree",
    "TreeCover",
    "MipModel",
    "build_model",
    "cover_to_assignment",
    "edge_flows",
    "spanning_forest",
    "warm_start",
    "BranchAndBound",
    "SolveResult",
    "decode",
    "parse_backend",
    "read_solution",
    "solve",
    "solve_instance",
]
