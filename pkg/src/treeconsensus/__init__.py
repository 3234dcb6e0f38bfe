"""Group decision support via exhaustive spanning-tree aggregation.

Experts compare alternatives pairwise on scales of their choice, possibly
leaving gaps. Every spanning tree of each expert's comparison graph yields a
complete consistent matrix and a priority vector; per-coordinate agreement is
scored with a double-entropy index, and while any coordinate falls short the
facilitation loop asks the most deviant expert to reconsider the most deviant
comparison. Aggregation is a rating-weighted geometric mean over all trees.
"""

from .aggregate import (
    AggregateResult,
    Rating,
    icpcm_from_priorities,
    rating,
    simple_aggregate,
    weighted_aggregate,
)
from .agreement import (
    AgreementReport,
    Spectrum,
    agreement_report,
    build_spectrum,
    double_entropy_index,
)
from .engine import EngineConfig, Evaluation, evaluate_group
from .errors import (
    DecisionError,
    InvalidJudgmentError,
    JudgmentConflictError,
    NoDataError,
    NoEligibleCellError,
    SessionStateError,
    SpectrumDomainError,
    StaleRequestError,
    TreeLimitError,
    UndefinedSpectrumError,
    UnknownSessionError,
    VersionConflictError,
)
from .feedback import (
    ConvergenceTrace,
    GroupState,
    Response,
    RevisionRequest,
    apply_revision,
    run_loop,
    select_revision_target,
)
from .pcm import (
    PCM,
    ComparisonGraph,
    CompletenessReport,
    Judgment,
    build_pcm,
    check_completeness,
)
from .scales import (
    Scale,
    ScaleRegistry,
    UnifiedScale,
    hartley_weight,
    pcm_scale_weight,
    to_unified,
    tree_scale_weight,
)
from .session import Session, SessionStore, replay_events
from .simulate import SimulationSpec, run_simulation, synthetic_state
from .spantree import (
    ICPCM,
    PriorityVector,
    SpanningTree,
    enumerate_trees,
    priorities_from_icpcm,
    reconstruct_icpcm,
    spanning_edge_sets,
    tree_priorities,
)

__version__ = "0.1.0"
