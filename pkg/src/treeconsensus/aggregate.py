"""Aggregation of tree priority vectors into the group answer.

The simple rule is a coordinate-wise geometric mean over all T tree vectors.
The competence-aware rule first rates every (tree, expert) pairing: each
tree's ideally consistent matrix is compared against every expert's raw PCM,
rewarding closeness (consistency when the expert owns the tree, compatibility
otherwise), the owners' and comparers' competences, and the information
weights of the scales involved. The m*T normalized ratings then become
exponents of a weighted geometric mean. Products run in log domain with
compensated summation, so the reduction order cannot drift the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NoDataError
from .pcm import PCM
from .spantree import ICPCM, PriorityVector

GEOMETRIC = "geometric"
ARITHMETIC = "arithmetic"
MEANS = (GEOMETRIC, ARITHMETIC)


@dataclass(frozen=True)
class Rating:
    """Weight of tree q of expert k when compared against expert l's matrix."""

    k: str
    q: int
    l: str
    value: float


@dataclass
class AggregateResult:
    """The group priority vector plus the evidence it was built from."""

    w: PriorityVector
    icpcm: ICPCM
    ratings: list[Rating]
    tree_count: int
    replica_count: int


def _check_mean(mean: str) -> None:
    if mean not in MEANS:
        raise ValueError(f"mean must be one of {MEANS}, got {mean!r}")


def simple_aggregate(vectors: Sequence[PriorityVector],
                     mean: str = GEOMETRIC) -> PriorityVector:
    """Coordinate-wise (geometric) mean of equally trusted vectors."""
    _check_mean(mean)
    if not vectors:
        raise NoDataError("no priority vectors to aggregate")
    stacked = np.stack([v.w for v in vectors])
    if mean == GEOMETRIC:
        coords = np.exp(np.mean(np.log(stacked), axis=0))
    else:
        coords = np.mean(stacked, axis=0)
    return PriorityVector(coords, "aggregate")


def rating(icpcm: ICPCM, other_pcm: PCM, c_k: float, c_l: float,
           s_kq: float, s_l: float) -> Rating:
    """Rate one tree's reconstructed matrix against one expert's raw matrix.

    The deviation sums |a_uv(tree) - a_uv(expert)| over the upper-triangle
    cells the expert actually provided; missing cells carry no opinion and are
    skipped. The denominator ln(deviation + e) is >= 1, so the rating stays
    positive whenever competences and scale weights are.
    """
    a = icpcm.matrix
    deviation = 0.0
    for i, j, value, _ in other_pcm.upper_triangle():
        deviation += abs(a[i, j] - value)
    k, q = icpcm.source
    value = c_k * c_l * s_kq * s_l / math.log(deviation + math.e)
    return Rating(k, q, other_pcm.expert, value)


def weighted_aggregate(vectors: Sequence[PriorityVector],
                       ratings: Sequence[Rating],
                       mean: str = GEOMETRIC) -> AggregateResult:
    """Blend tree vectors with rating-normalized exponents.

    Every vector's source (k, q) must be covered by one rating per comparison
    expert l; the mT normalized ratings sum to 1 and a vector's effective
    exponent is the sum of its m ratings' shares. When all ratings are equal
    this reduces exactly to the simple aggregate.
    """
    _check_mean(mean)
    if not vectors:
        raise NoDataError("no priority vectors to aggregate")
    if not ratings:
        raise NoDataError("no ratings supplied")

    experts = sorted({r.l for r in ratings})
    m = len(experts)
    by_source: dict[tuple[str, int], list[Rating]] = {}
    for r in ratings:
        by_source.setdefault((r.k, r.q), []).append(r)
    for v in vectors:
        covering = by_source.get(v.source, [])
        if len(covering) != m:
            raise ValueError(
                f"vector {v.source} has {len(covering)} ratings, expected {m}"
            )
    if len(ratings) != m * len(vectors):
        raise ValueError(
            f"{len(ratings)} ratings for {len(vectors)} trees x {m} experts"
        )

    total = math.fsum(r.value for r in ratings)
    if total <= 0:
        raise NoDataError("all ratings are zero; nothing to weight")
    n = vectors[0].n
    if mean == GEOMETRIC:
        log_coords = np.array([
            math.fsum(
                math.fsum(r.value for r in by_source[v.source]) / total
                * math.log(v.w[coord])
                for v in vectors
            )
            for coord in range(n)
        ])
        coords = np.exp(log_coords)
    else:
        coords = np.zeros(n)
        for v in vectors:
            share = math.fsum(r.value for r in by_source[v.source]) / total
            coords += share * v.w
    w = PriorityVector(coords, "aggregate")
    return AggregateResult(
        w=w,
        icpcm=icpcm_from_priorities(w),
        ratings=list(ratings),
        tree_count=len(vectors),
        replica_count=len(ratings),
    )


def icpcm_from_priorities(w: PriorityVector) -> ICPCM:
    """The consistent matrix a_ij = w_i / w_j implied by a priority vector."""
    matrix = np.outer(w.w, 1.0 / w.w)
    return ICPCM(matrix, "aggregate")
