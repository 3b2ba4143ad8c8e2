"""
Stitching-tuple selectors

    random   uniform pick with a seeded generator
    cfs      the tuple whose anchor directly follows the parent edge's entry
             point (B(p) = q'), otherwise the first tuple
    mcs      the tuple whose stitch changes curvature the least
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np

from ..isograph.tuples import StitchingTuple

SELECTOR_KINDS = ("random", "cfs", "mcs")
TIE_TOLERANCE = 1e-9


class CurvatureContext(Protocol):
    def delta_kappa(self, t: StitchingTuple) -> Tuple[float, float]:
        """(two-point change, four-point windowed change) for stitching ``t``"""


def select_random(
    tuples: Sequence[StitchingTuple],
    rng: Union[int, np.random.Generator]
) -> StitchingTuple:
    if not tuples:
        raise ValueError("cannot select from an empty tuple set")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return tuples[int(rng.integers(len(tuples)))]


def select_cfs(
    tuples: Sequence[StitchingTuple],
    prev_tuple: Optional[StitchingTuple],
    anchor_size: int
) -> StitchingTuple:
    """
    Args:
        tuples: Candidates oriented from the parent isoline (p_index on it)
        prev_tuple: Tuple selected on the edge into the parent, q_index on
            the parent isoline; None for edges leaving the root
        anchor_size: Point count of the parent isoline
    """
    if not tuples:
        raise ValueError("cannot select from an empty tuple set")
    if prev_tuple is not None:
        for t in tuples:
            if (t.p_index - 1) % anchor_size == prev_tuple.q_index:
                return t
    return tuples[0]


def score_mcs(tuples: Sequence[StitchingTuple], context: CurvatureContext) -> List[Tuple[float, float]]:
    return [context.delta_kappa(t) for t in tuples]


def select_mcs(
    tuples: Sequence[StitchingTuple],
    context: CurvatureContext,
    window: bool = True,
    maximize: bool = False
) -> StitchingTuple:
    """
    Tuple with the smallest curvature change (largest when ``maximize``)

    Ties within 1e-9 go to the lowest p_index.
    """
    if not tuples:
        raise ValueError("cannot select from an empty tuple set")
    scores = [s[1] if window else s[0] for s in score_mcs(tuples, context)]
    return tuples[_pick(scores, maximize)]


def _pick(scores: Sequence[float], maximize: bool) -> int:
    values = np.asarray(scores, dtype=float)
    if maximize:
        values = np.where(np.isfinite(values), -values, math.inf)
    best = float(np.min(values))
    if not math.isfinite(best):
        return 0
    tolerance = TIE_TOLERANCE * max(1.0, abs(best))
    return int(np.nonzero(values <= best + tolerance)[0][0])


@dataclass
class Selector:
    """Selector configuration plus the generator state of a random selector"""

    kind: str = "mcs"
    seed: int = 0
    window: bool = True                 # mcs: four-point curvature window
    maximize: bool = False              # mcs: argmax instead of argmin
    last_scores: Optional[Tuple[float, float]] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.kind not in SELECTOR_KINDS:
            raise ValueError(f"Unknown selector: {self.kind}. Choose from {SELECTOR_KINDS}")
        self._rng = np.random.default_rng(self.seed)

    def fresh(self, offset: int = 0) -> "Selector":
        """Independent copy whose generator is seeded with seed + offset"""
        return Selector(self.kind, self.seed + offset, self.window, self.maximize)

    def select(
        self,
        tuples: Sequence[StitchingTuple],
        prev_tuple: Optional[StitchingTuple],
        anchor_size: int,
        context: CurvatureContext
    ) -> StitchingTuple:
        self.last_scores = None
        if self.kind == "random":
            return select_random(tuples, self._rng)
        if self.kind == "cfs":
            return select_cfs(tuples, prev_tuple, anchor_size)
        chosen = select_mcs(tuples, context, self.window, self.maximize)
        self.last_scores = context.delta_kappa(chosen)
        return chosen
