"""Exception types shared across the engine and the service layer."""


class DecisionError(Exception):
    """Base class for all treeconsensus errors."""


class InvalidJudgmentError(DecisionError, ValueError):
    """A judgment is malformed: bad grade range, i == j, unknown scale."""


class JudgmentConflictError(DecisionError, ValueError):
    """Two judgments for the same unordered pair disagree."""

    def __init__(self, expert: str, i: int, j: int, message: str = ""):
        self.expert = expert
        self.pair = (i, j)
        super().__init__(
            message or f"conflicting judgments for pair ({i}, {j}) of expert {expert!r}"
        )


class NoDataError(DecisionError, ValueError):
    """An aggregation was requested over an empty collection."""


class SpectrumDomainError(DecisionError, ValueError):
    """A spectrum value lies outside the (0, 1] priority domain."""


class UndefinedSpectrumError(DecisionError, ValueError):
    """A spectrum has zero total mass; the agreement index is undefined."""


class TreeLimitError(DecisionError, RuntimeError):
    """Spanning-tree enumeration refused: the tree count would be astronomical."""


class NoEligibleCellError(DecisionError, RuntimeError):
    """No comparison can be targeted for revision; escalate to the facilitator."""


class StaleRequestError(DecisionError, RuntimeError):
    """A revision response refers to a request that is no longer open."""


class VersionConflictError(DecisionError, RuntimeError):
    """Optimistic-concurrency failure: the session changed since the client read it."""


class UnknownSessionError(DecisionError, KeyError):
    """No session with the given id exists in the store."""


class SessionStateError(DecisionError, RuntimeError):
    """An operation is not valid in the session's current lifecycle status."""
