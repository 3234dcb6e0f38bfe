"""One full evaluation pass over a group of PCMs.

Order of play: check completeness of the union comparison graph, enumerate
each expert's spanning trees, reconstruct the consistent matrix and priority
vector of every tree, score per-coordinate agreement from the
competence-weighted spectrums, and rate every (tree, expert) replica to build
the weighted aggregate. The aggregate is computed even when agreement fails:
its implied consistent matrix is the target the feedback loop steers toward.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

from .aggregate import (
    GEOMETRIC,
    MEANS,
    AggregateResult,
    Rating,
    rating,
    weighted_aggregate,
)
from .agreement import DEFAULT_EPSILON, DEFAULT_THRESHOLD, AgreementReport, agreement_report
from .errors import NoDataError
from .pcm import PCM, CompletenessReport, check_completeness
from .scales import DEFAULT_GRADE_COUNTS, ScaleRegistry, pcm_scale_weight, tree_scale_weight
from .spantree import PriorityVector, SpanningTree, enumerate_trees, priorities_from_icpcm, reconstruct_icpcm

log = logging.getLogger(__name__)

INCOMPLETE = "incomplete"
CONVERGED = "converged"
AWAITING_REVISION = "awaiting-revision"


@dataclass(frozen=True)
class EngineConfig:
    """Knobs of one facilitation session; defaults mirror the method's own."""

    epsilon: float = DEFAULT_EPSILON
    threshold: float = DEFAULT_THRESHOLD
    cap: int = 50
    mean: str = GEOMETRIC
    scale_grades: tuple[int, ...] = DEFAULT_GRADE_COUNTS
    spectrum_grades: int | None = None
    strict_scale_weight: bool = False
    # revision targeting ignores deviations below this fraction of the
    # aggregate value: they cannot move a spectrum bin and asking would only
    # churn the experts
    revision_floor: float = 0.05

    def __post_init__(self):
        if self.mean not in MEANS:
            raise ValueError(f"mean must be one of {MEANS}")
        if self.cap < 0:
            raise ValueError("cap must be >= 0")
        if not (0 <= self.threshold < 1):
            raise ValueError("threshold must lie in [0, 1)")

    def registry(self) -> ScaleRegistry:
        return ScaleRegistry(self.scale_grades)


@dataclass
class Evaluation:
    """Everything one pipeline pass produced."""

    completeness: CompletenessReport
    trees: dict[str, list[SpanningTree]]
    vectors: list[PriorityVector] = field(default_factory=list)
    report: AgreementReport | None = None
    result: AggregateResult | None = None
    status: str = INCOMPLETE

    @property
    def tree_count(self) -> int:
        return sum(len(ts) for ts in self.trees.values())


def evaluate_group(pcms: Mapping[str, PCM], competences: Mapping[str, float],
                   config: EngineConfig = EngineConfig()) -> Evaluation:
    """Run the pipeline on the group's current matrices.

    Status is "incomplete" when the union graph is disconnected or when no
    expert's individual graph supports a single spanning tree (the group may
    be union-complete yet have nothing to enumerate; more comparisons are
    needed either way). Otherwise the status reflects the agreement report:
    "converged" when every coordinate clears the threshold, else
    "awaiting-revision".
    """
    if not pcms:
        raise NoDataError("no expert matrices")
    completeness = check_completeness(list(pcms.values()))
    trees: dict[str, list[SpanningTree]] = {}
    if not completeness.complete:
        return Evaluation(completeness, trees)

    for expert, pcm in pcms.items():
        trees[expert] = enumerate_trees(pcm)
        if not trees[expert]:
            log.warning("expert %r has no spanning tree; their matrix contributes nothing", expert)
    if all(not ts for ts in trees.values()):
        return Evaluation(completeness, trees)

    pcm_weights = {
        expert: pcm_scale_weight(pcm, strict_missing=config.strict_scale_weight)
        for expert, pcm in pcms.items()
    }
    vectors: list[PriorityVector] = []
    ratings: list[Rating] = []
    for expert, expert_trees in trees.items():
        c_k = competences[expert]
        for tree in expert_trees:
            icpcm = reconstruct_icpcm(tree)
            vectors.append(priorities_from_icpcm(icpcm))
            s_kq = tree_scale_weight(tree.edge_scales())
            for other, other_pcm in pcms.items():
                ratings.append(
                    rating(icpcm, other_pcm, c_k, competences[other],
                           s_kq, pcm_weights[other])
                )

    weighted = [(v, competences[v.source[0]]) for v in vectors]
    report = agreement_report(
        weighted,
        epsilon=config.epsilon,
        threshold=config.threshold,
        grades=config.spectrum_grades,
    )
    result = weighted_aggregate(vectors, ratings, mean=config.mean)
    status = CONVERGED if report.passing else AWAITING_REVISION
    return Evaluation(completeness, trees, vectors, report, result, status)
