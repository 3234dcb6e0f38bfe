"""The agreement-improvement loop.

While any coordinate's agreement index sits at or below the threshold, the
facilitator asks one expert to reconsider one comparison: in the row of the
worst coordinate, the cell (over all experts and columns) that deviates most
from the aggregate's implied value. The expert may accept the suggested
value, answer with a compromise, or decline; after every applied change the
whole pipeline is recomputed, so the next request always chases a fresh
target. The loop ends at convergence, at the round cap, or when no eligible
cell remains to ask about.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Collection

from .engine import AWAITING_REVISION, CONVERGED, EngineConfig, Evaluation, evaluate_group
from .errors import NoEligibleCellError, SessionStateError, StaleRequestError
from .pcm import PCM
from .scales import Scale

#: deviations at or below this are no-ops and never worth a request
MIN_DEVIATION = 1e-12

ACCEPT = "accept"
VALUE = "value"
DECLINE = "decline"

CAP_REACHED = "cap-reached"
EXPERT_DECLINED = "expert-declined"


@dataclass
class GroupState:
    """Mutable facilitation state the loop operates on."""

    pcms: dict[str, PCM]
    competences: dict[str, float]
    config: EngineConfig = EngineConfig()
    version: int = 0

    def evaluate(self) -> Evaluation:
        return evaluate_group(self.pcms, self.competences, self.config)


@dataclass(frozen=True)
class RevisionRequest:
    """A targeted ask: one expert, one cell, and the value to move toward."""

    expert: str
    i: int
    j: int
    current_value: float
    suggested_value: float
    coordinate: int
    round_number: int
    state_version: int


@dataclass(frozen=True)
class Response:
    """An expert's answer to a revision request."""

    action: str
    value: float | None = None
    scale: Scale | None = None

    def __post_init__(self):
        if self.action not in (ACCEPT, VALUE, DECLINE):
            raise ValueError(f"unknown revision action {self.action!r}")
        if self.action == VALUE and (self.value is None or self.value <= 0):
            raise ValueError("a value response needs a positive ratio")


Responder = Callable[[RevisionRequest], Response]


@dataclass
class RoundRecord:
    round_number: int
    min_index: float
    worst_coordinate: int
    request: RevisionRequest
    response: Response
    applied: bool


@dataclass
class ConvergenceTrace:
    rounds: list[RoundRecord]
    status: str
    final: Evaluation

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def _best_cell(state: GroupState, aggregate, rows: Collection[int],
               exclude: Collection[tuple[str, int, int]],
               ) -> tuple[str, int, int] | None:
    """Largest eligible |aggregate - provided| deviation over the given rows.

    A cell is eligible when the expert provided it, it was not declined last
    round, and its deviation is meaningful: above the configured floor
    relative to the aggregate value, so the loop never chases no-ops that
    cannot move a spectrum. Ties break toward the lowest (expert id, row,
    column).
    """
    floor_rel = state.config.revision_floor
    best: tuple[float, str, int, int] | None = None
    for expert in sorted(state.pcms):
        pcm = state.pcms[expert]
        for row in sorted(rows):
            for col in range(pcm.n):
                if col == row or not pcm.has_cell(row, col):
                    continue
                if (expert, row, col) in exclude:
                    continue
                target = aggregate[row, col]
                deviation = abs(target - pcm.value(row, col))
                if deviation <= max(MIN_DEVIATION, floor_rel * abs(target)):
                    continue
                if best is None or deviation > best[0]:
                    best = (deviation, expert, row, col)
    if best is None:
        return None
    return best[1], best[2], best[3]


def select_revision_target(state: GroupState, evaluation: Evaluation,
                           exclude: Collection[tuple[str, int, int]] = (),
                           round_number: int = 1) -> RevisionRequest:
    """Pick the most outstanding comparison to move toward the aggregate.

    The search runs over the worst coordinate's row first, across all experts
    and columns. When that row is already polished to within bin resolution
    (its remaining deviations cannot move any spectrum) but agreement still
    fails, the search widens to the whole matrix: off-row cells are then the
    only thing keeping the spectrums spread. Raises NoEligibleCellError when
    nothing anywhere is worth asking about, which is the facilitator's cue to
    intervene by hand.
    """
    if evaluation.report is None or evaluation.result is None:
        raise SessionStateError("evaluation did not reach the agreement stage")
    if evaluation.report.passing:
        raise SessionStateError("agreement already passes; nothing to revise")
    row = evaluation.report.worst_coordinate
    aggregate = evaluation.result.icpcm.matrix
    found = _best_cell(state, aggregate, [row], exclude)
    if found is None:
        found = _best_cell(state, aggregate, range(aggregate.shape[0]), exclude)
    if found is None:
        raise NoEligibleCellError(
            f"no revisable comparison left (worst row {row}); "
            "facilitator attention needed"
        )
    expert, i, j = found
    return RevisionRequest(
        expert=expert,
        i=i,
        j=j,
        current_value=state.pcms[expert].value(i, j),
        suggested_value=float(aggregate[i, j]),
        coordinate=row,
        round_number=round_number,
        state_version=state.version,
    )


def apply_revision(state: GroupState, request: RevisionRequest,
                   response: Response) -> Evaluation | None:
    """Apply an expert's answer and recompute the pipeline.

    Accepted and value answers replace the cell (and its reciprocal) and
    return the fresh evaluation; declines change nothing and return None.
    A request issued against an older state version is stale and rejected.
    """
    if request.state_version != state.version:
        raise StaleRequestError(
            f"request was issued at version {request.state_version}, "
            f"state is at {state.version}"
        )
    if response.action == DECLINE:
        return None
    new_value = request.suggested_value if response.action == ACCEPT else float(response.value)
    scale = response.scale
    if scale is None:
        scale = state.pcms[request.expert].scale_at(request.i, request.j)
    state.pcms[request.expert] = state.pcms[request.expert].with_cell(
        request.i, request.j, new_value, scale
    )
    state.version += 1
    return state.evaluate()


def run_loop(state: GroupState, responder: Responder,
             cap: int | None = None) -> ConvergenceTrace:
    """Iterate select -> respond -> apply -> re-evaluate until done.

    Terminal status is "converged" (min index above threshold), "cap-reached"
    (round budget exhausted), or "expert-declined" (no eligible cell left,
    e.g. every remaining deviation declined or already zero).
    """
    if cap is None:
        cap = state.config.cap
    evaluation = state.evaluate()
    if evaluation.status not in (CONVERGED, AWAITING_REVISION):
        raise SessionStateError("group is incomplete; collect comparisons first")

    rounds: list[RoundRecord] = []
    declined_last_round: set[tuple[str, int, int]] = set()
    for round_number in range(1, cap + 1):
        if evaluation.report.passing:
            status = CONVERGED
            break
        try:
            request = select_revision_target(
                state, evaluation, exclude=declined_last_round,
                round_number=round_number,
            )
        except NoEligibleCellError:
            status = EXPERT_DECLINED
            break
        response = responder(request)
        new_evaluation = apply_revision(state, request, response)
        declined_last_round = (
            {(request.expert, request.i, request.j)}
            if response.action == DECLINE else set()
        )
        applied = new_evaluation is not None
        if applied:
            evaluation = new_evaluation
        rounds.append(RoundRecord(
            round_number=round_number,
            min_index=evaluation.report.min_index,
            worst_coordinate=evaluation.report.worst_coordinate,
            request=request,
            response=response,
            applied=applied,
        ))
    else:
        status = CONVERGED if evaluation.report.passing else CAP_REACHED
    return ConvergenceTrace(rounds, status, evaluation)
