"""
Error types raised by the MCFS planner

Every error can carry the pipeline stage it came from so that ``plan()``
callers (and the CLI) can report where a run failed.
"""

from typing import Optional


class MCFSError(Exception):
    """Base class for planner errors"""

    def __init__(self, message: str, stage: Optional[str] = None):
        super().__init__(message)
        self.stage = stage

    def with_stage(self, stage: str) -> "MCFSError":
        if self.stage is None:
            self.stage = stage
        return self

    def __str__(self) -> str:
        message = super().__str__()
        if self.stage:
            return f"[{self.stage}] {message}"
        return message


class ConfigurationError(MCFSError, ValueError):
    """Invalid planner configuration"""


class WorkspaceError(MCFSError, ValueError):
    """Invalid or degenerate workspace polygon"""


class NoCoverableLayersError(MCFSError, ValueError):
    """Workspace is thinner than 2*l everywhere: no isoline layer exists"""


class UnstitchableEdgeError(MCFSError):
    """All stitching tuples of a tree edge were consumed before its visit"""

    def __init__(self, u: int, v: int, stage: Optional[str] = None):
        super().__init__(f"unstitchable edge ({u}, {v}): no unused stitching tuple left", stage)
        self.edge = (u, v)


class InfeasibleInstanceError(MCFSError):
    """Some isovertex cannot be reached from any root"""


class IntegrityError(MCFSError):
    """A tree cover or variable assignment violates the model constraints"""
