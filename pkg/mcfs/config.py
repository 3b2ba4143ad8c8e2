"""
Configuration classes for MCFS planning runs
"""

import dataclasses
import os
from typing import List, Optional, Sequence, Tuple

from .cfs.selectors import SELECTOR_KINDS
from .exceptions import ConfigurationError
from .mmrtc.solver import parse_backend
from .refine.splitting import DEFAULT_BUDGET

VARIANTS = {
    # name: (enable_augment, enable_refine)
    "none": (False, False),
    "ref": (False, True),
    "aug": (True, False),
    "both": (True, True),
}

TIME_LIMIT_ENV = "MCFS_TIME_LIMIT"
DEFAULT_TIME_LIMIT = 60.0


def default_time_limit() -> float:
    raw = os.environ.get(TIME_LIMIT_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_TIME_LIMIT
    try:
        value = float(raw)
    except ValueError:
        raise ConfigurationError(f"{TIME_LIMIT_ENV} must be a number of seconds, got {raw!r}")
    if value < 0:
        raise ConfigurationError(f"{TIME_LIMIT_ENV} must be >= 0, got {value}")
    return value


@dataclasses.dataclass
class SolverConfig:
    """Tree-cover solver settings"""

    backend: str = "bundled"                # bundled | highs | external:<command>
    time_limit: Optional[float] = None      # seconds; None = $MCFS_TIME_LIMIT or 60
    node_limit: Optional[int] = None        # branch-and-bound nodes (bundled only)

    def __post_init__(self):
        try:
            parse_backend(self.backend)
        except ValueError as exc:
            raise ConfigurationError(str(exc))
        if self.time_limit is None:
            self.time_limit = default_time_limit()
        if self.time_limit < 0:
            raise ConfigurationError(f"time_limit must be >= 0, got {self.time_limit}")
        if self.node_limit is not None and self.node_limit < 1:
            raise ConfigurationError(f"node_limit must be >= 1, got {self.node_limit}")


@dataclasses.dataclass
class RefineConfig:
    """Refinement settings"""

    budget: int = DEFAULT_BUDGET            # tuple assignments evaluated per split
    trace_path: Optional[str] = None        # JSON-lines trace output

    def __post_init__(self):
        if self.budget < 1:
            raise ConfigurationError(f"refinement budget must be >= 1, got {self.budget}")


@dataclasses.dataclass
class GridConfig:
    """Rasterization used by the coverage and overlap metrics (None = derived from l)"""

    cell_size: Optional[float] = None           # l/4
    coverage_radius: Optional[float] = None     # l/2, half the cover diameter
    revisit_separation: Optional[float] = None  # 2*l of path arc length

    def resolved(self, l: float) -> Tuple[float, float, float]:
        return (
            self.cell_size if self.cell_size is not None else l / 4.0,
            self.coverage_radius if self.coverage_radius is not None else l / 2.0,
            self.revisit_separation if self.revisit_separation is not None else 2.0 * l,
        )


@dataclasses.dataclass
class PlanConfig:
    """Complete configuration of one planning run"""

    l: float                                # isoline step = cover diameter (length units)
    robots: List[Tuple[float, float]]       # one start position per robot
    delta: Optional[int] = None             # augmentation level; None = min(k, 4)
    selector: str = "mcs"                   # random | cfs | mcs
    window: bool = True                     # mcs: four-point curvature window
    maximize: bool = False                  # mcs: pick the largest curvature change
    enable_augment: bool = True
    enable_refine: bool = True
    bridge: bool = False                    # join disconnected isographs
    seed: int = 0
    cell_size: Optional[float] = None       # distance-field cell; None = l/4
    solver: SolverConfig = dataclasses.field(default_factory=SolverConfig)
    refine: RefineConfig = dataclasses.field(default_factory=RefineConfig)
    grid: GridConfig = dataclasses.field(default_factory=GridConfig)

    def __post_init__(self):
        if not self.l or self.l <= 0:
            raise ConfigurationError(f"isoline step l must be > 0, got {self.l}")
        self.robots = [(float(x), float(y)) for x, y in self.robots]
        if not self.robots:
            raise ConfigurationError("at least one robot is required")
        if self.selector not in SELECTOR_KINDS:
            raise ConfigurationError(f"Unknown selector: {self.selector}. Choose from {SELECTOR_KINDS}")
        if self.delta is None:
            self.delta = min(self.k, 4)
            if self.enable_augment:
                self.delta = max(self.delta, 2)
        if self.enable_augment and self.delta < 2:
            raise ConfigurationError(f"augmentation level delta must be >= 2, got {self.delta}")
        if self.cell_size is None:
            self.cell_size = self.l / 4.0
        if self.cell_size <= 0:
            raise ConfigurationError(f"cell_size must be > 0, got {self.cell_size}")

    @property
    def k(self) -> int:
        return len(self.robots)

    @property
    def time_limit(self) -> float:
        return self.solver.time_limit

    @property
    def variant(self) -> str:
        for name, flags in VARIANTS.items():
            if flags == (self.enable_augment, self.enable_refine):
                return name
        return "both"

    def for_variant(self, variant: str) -> "PlanConfig":
        """Copy with the augmentation/refinement flags of an ablation variant"""
        if variant not in VARIANTS:
            raise ConfigurationError(f"Unknown variant: {variant}. Choose from {list(VARIANTS)}")
        augment, refine = VARIANTS[variant]
        delta = self.delta if self.delta is not None and self.delta >= 2 else max(2, min(self.k, 4))
        return dataclasses.replace(self, enable_augment=augment, enable_refine=refine, delta=delta)

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["robots"] = [list(r) for r in self.robots]
        data["variant"] = self.variant
        return data


def parse_robots(specs: Sequence[str]) -> List[Tuple[float, float]]:
    """
    Robot start positions from "x,y" or "count@x,y" strings

    >>> parse_robots(["2@0,0", "1.5,-1"])
    [(0.0, 0.0), (0.0, 0.0), (1.5, -1.0)]
    """
    robots = []
    for spec in specs:
        for item in spec.split(";"):
            item = item.strip()
            if not item:
                continue
            count, _, position = item.rpartition("@")
            try:
                n = int(count) if count else 1
                x, y = (float(c) for c in position.split(","))
            except ValueError:
                raise ConfigurationError(f"invalid robot spec {item!r}; expected x,y or count@x,y")
            if n < 1:
                raise ConfigurationError(f"robot count must be >= 1 in {item!r}")
            robots.extend([(x, y)] * n)
    if not robots:
        raise ConfigurationError("no robots given")
    return robots


def create_default_config(l: float, robots: Sequence[Tuple[float, float]], variant: str = "both", **kwargs) -> PlanConfig:
    """PlanConfig for ``variant`` with remaining fields from keyword arguments"""
    if variant not in VARIANTS:
        raise ConfigurationError(f"Unknown variant: {variant}. Choose from {list(VARIANTS)}")
    augment, refine = VARIANTS[variant]
    return PlanConfig(l=l, robots=list(robots), enable_augment=augment, enable_refine=refine, **kwargs)
