"""
MCFS - Multi-robot Connected Fermat Spiral coverage planning

Plans one closed coverage path per robot over a 2D workspace with holes:
layered isolines are grouped into an isograph, split among robots by a
min-max rooted tree cover and stitched into connected Fermat spirals.
"""

__version__ = "0.1.0"

from .config import GridConfig, PlanConfig, RefineConfig, SolverConfig, create_default_config, parse_robots
from .exceptions import (
    ConfigurationError,
    InfeasibleInstanceError,
    IntegrityError,
    MCFSError,
    NoCoverableLayersError,
    UnstitchableEdgeError,
    WorkspaceError,
)
from .geometry import Workspace, load_workspace
from .cfs import CoveragePath
from .analysis import PlanReport, compute_metrics
from .planner import MCFSPlanner, PlanResult, plan

__all__ = [
    "GridConfig",
    "PlanConfig",
    "RefineConfig",
    "SolverConfig",
    "create_default_config",
    "parse_robots",
    "ConfigurationError",
    "InfeasibleInstanceError",
    "IntegrityError",
    "MCFSError",
    "NoCoverableLayersError",
    "UnstitchableEdgeError",
    "WorkspaceError",
    "Workspace",
    "load_workspace",
    "CoveragePath",
    "PlanReport",
    "compute_metrics",
    "MCFSPlanner",
    "PlanResult",
    "plan",
]
