"""Estimation scales, unified-scale conversion, and Hartley information weights.

Every pairwise comparison is given in some N-grade scale (N >= 2). A scale's
information capacity is its Hartley weight log2(N); a missing comparison
weighs exactly 0. Judgments from coarser scales are mapped into the most
detailed ("unified") scale before any matrix work. Whole comparison sets are
weighted by geometric means of their cells' Hartley weights: a spanning tree
over its n-1 edges, a PCM over its n(n-1)/2 upper-triangle cells.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidJudgmentError

log = logging.getLogger(__name__)

#: Marker for an absent comparison. Its Hartley weight is 0.
MISSING = None

#: Grade counts registered by default; sessions may extend the registry.
DEFAULT_GRADE_COUNTS = (2, 3, 5, 7, 9)


@dataclass(frozen=True, order=True)
class Scale:
    """An estimation scale identified by its number of grades."""

    grades: int

    def __post_init__(self):
        if self.grades < 2:
            raise InvalidJudgmentError(f"a scale needs at least 2 grades, got {self.grades}")


@dataclass(frozen=True)
class UnifiedScale:
    """The most detailed scale in play; all judgments are converted into it."""

    grades: int

    def __post_init__(self):
        if self.grades < 2:
            raise InvalidJudgmentError(f"unified scale needs at least 2 grades, got {self.grades}")


class ScaleRegistry:
    """Known scales for a session, keyed by grade count."""

    def __init__(self, grade_counts: Iterable[int] = DEFAULT_GRADE_COUNTS):
        self._scales: dict[int, Scale] = {}
        for n in grade_counts:
            self.register(n)

    def register(self, grades: int) -> Scale:
        scale = Scale(grades)
        self._scales[grades] = scale
        return scale

    def get(self, grades: int) -> Scale:
        try:
            return self._scales[grades]
        except KeyError:
            raise InvalidJudgmentError(
                f"scale with {grades} grades is not registered "
                f"(registered: {sorted(self._scales)})"
            ) from None

    def grade_counts(self) -> list[int]:
        return sorted(self._scales)

    def unified(self) -> UnifiedScale:
        # Derived from the registry rather than from the judgments actually
        # submitted so far: the conversion target must not drift while a
        # session is still collecting.
        return UnifiedScale(max(self._scales))


def hartley_weight(scale: Scale | None) -> float:
    """Information capacity log2(N) of a scale; 0 for a missing comparison."""
    if scale is MISSING:
        return 0.0
    return math.log2(scale.grades)


def to_unified(grade: float, scale: Scale, unified: UnifiedScale) -> float:
    """Map a grade from its source scale onto the unified scale.

    Integer grades use the rounded linear index map
    g' = round((g-1)(N_max-1)/(N-1)) + 1, which is monotone and fixes both
    endpoints. Real-valued grades (revision compromises expressed on the
    unified scale itself) use the same map without rounding so that values
    round-trip exactly through serialization.
    """
    n, n_max = scale.grades, unified.grades
    if n > n_max:
        raise InvalidJudgmentError(f"scale {n} exceeds unified scale {n_max}")
    if not (1 <= grade <= n):
        raise InvalidJudgmentError(f"grade {grade} outside 1..{n}")
    stretched = (grade - 1) * (n_max - 1) / (n - 1)
    if isinstance(grade, float) and not grade.is_integer():
        return stretched + 1
    # round half away from zero: independent of the host's half-even rounding
    return int(math.floor(stretched + 0.5)) + 1


def _geometric_mean(values: Sequence[float]) -> float:
    return math.exp(math.fsum(math.log(v) for v in values) / len(values))


def tree_scale_weight(edge_scales: Sequence[Scale | None]) -> float:
    """Weight s of a basic comparison set: GM of its edges' Hartley weights.

    A tree with any missing edge carries no usable information and weighs 0.
    """
    weights = [hartley_weight(s) for s in edge_scales]
    if not weights or any(w == 0.0 for w in weights):
        return 0.0
    return _geometric_mean(weights)


def pcm_scale_weight(pcm, strict_missing: bool = False) -> float:
    """Weight s of a whole PCM: GM of Hartley weights over upper-triangle cells.

    By default missing cells are excluded from the mean (completeness is
    already rewarded through the tree counts); with ``strict_missing`` any
    missing cell zeroes the weight, reading the formula literally.
    """
    n = pcm.n
    tags = pcm.upper_triangle_scales()
    if strict_missing and len(tags) < n * (n - 1) // 2:
        return 0.0
    if not tags:
        log.warning("PCM of expert %r has no off-diagonal cells; scale weight 0", pcm.expert)
        return 0.0
    return _geometric_mean([hartley_weight(s) for s in tags])
