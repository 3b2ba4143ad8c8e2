"""
Refinement of tree covers: pairwise isovertex splitting and improving
repetitions
"""

from .splitting import DEFAULT_BUDGET, SplitLoop, SplitOutcome, assignments, cyclic_order_ok, pis, split_loops
from .refinement import RefinementResult, RefinementState, air, refine

__all__ = [
    "DEFAULT_BUDGET",
    "SplitLoop",
    "SplitOutcome",
    "assignments",
    "cyclic_order_ok",
    "pis",
    "split_loops",
    "RefinementResult",
    "RefinementState",
    "air",
    "refine",
]
