"""Facilitation sessions: lifecycle, judgment intake, evaluation, persistence.

A session owns the expert roster with competences, the current judgments, the
engine configuration, and an append-only event log. Judgments are stored in
dominance-canonical form ({expert, i, j, grade, scale_grades} with the
dominant alternative first), so a record round-trips bit-exactly through the
JSON session file; revision answers arrive as unified-scale ratios and are
stored the same way with the unified grade count as their scale tag.

Every mutation appends an event and bumps the version counter; replaying the
event log from scratch must land on the same state, which the test suite and
the service's consistency check both rely on.
"""

from __future__ import annotations

import json
import os
import secrets
import tempfile
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .aggregate import MEANS
from .engine import AWAITING_REVISION, CONVERGED, INCOMPLETE, EngineConfig, Evaluation
from .errors import (
    InvalidJudgmentError,
    JudgmentConflictError,
    NoEligibleCellError,
    SessionStateError,
    StaleRequestError,
    UnknownSessionError,
    VersionConflictError,
)
from .feedback import ACCEPT, DECLINE, VALUE, GroupState, select_revision_target
from .pcm import PCM, Judgment, build_pcm
from .scales import to_unified

COLLECTING = "collecting"
EVALUATING = "evaluating"
CAPPED = "capped"

STATUSES = (COLLECTING, INCOMPLETE, EVALUATING, AWAITING_REVISION, CONVERGED, CAPPED)


@dataclass(frozen=True)
class Expert:
    id: str
    competence: float
    name: str = ""


@dataclass(frozen=True)
class JudgmentRecord:
    """One stored comparison: dominant alternative first, ratio grade >= 1."""

    expert: str
    i: int
    j: int
    grade: float
    scale_grades: int

    def unordered(self) -> tuple[str, int, int]:
        lo, hi = (self.i, self.j) if self.i < self.j else (self.j, self.i)
        return (self.expert, lo, hi)


def canonical_record(expert: str, i: int, j: int, grade: float,
                     scale_grades: int, direction: str = ">") -> JudgmentRecord:
    """Normalize a wire judgment into a stored record.

    Direction folds into cell orientation: "<" swaps the pair so the dominant
    alternative always comes first. Indifference (grade 1) keeps ascending
    index order for stability.
    """
    if direction not in (">", "<"):
        raise InvalidJudgmentError(f"direction must be '>' or '<', got {direction!r}")
    if i == j:
        raise InvalidJudgmentError(f"self-comparison ({i}, {i})")
    if direction == "<":
        i, j = j, i
    if grade == 1 and i > j:
        i, j = j, i
    return JudgmentRecord(expert, i, j, float(grade), int(scale_grades))


@dataclass
class SessionResults:
    w: list[float]
    K: list[float]
    status: str

    def to_dict(self) -> dict:
        return {"w": self.w, "K": self.K, "status": self.status}


@dataclass
class Session:
    id: str
    token: str
    alternatives: list[str]
    experts: list[Expert]
    config: EngineConfig
    judgments: dict[tuple[str, int, int], JudgmentRecord] = field(default_factory=dict)
    status: str = COLLECTING
    version: int = 0
    round: int = 0
    results: SessionResults | None = None
    open_request: dict | None = None
    declined_last_round: list[list] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)

    # ---- construction -----------------------------------------------------

    @classmethod
    def create(cls, alternatives: Iterable[str], experts: Iterable[Mapping[str, Any]],
               config: EngineConfig | None = None, session_id: str | None = None,
               token: str | None = None) -> "Session":
        alternatives = [str(a) for a in alternatives]
        if len(alternatives) < 2:
            raise SessionStateError("a session needs at least 2 alternatives")
        if len(set(alternatives)) != len(alternatives):
            raise SessionStateError("alternative labels must be unique")
        roster: list[Expert] = []
        for spec in experts:
            competence = float(spec.get("competence", 1.0))
            if competence <= 0:
                raise SessionStateError(f"competence of {spec.get('id')!r} must be positive")
            roster.append(Expert(str(spec["id"]), competence, str(spec.get("name", ""))))
        if not roster:
            raise SessionStateError("a session needs at least one expert")
        if len({e.id for e in roster}) != len(roster):
            raise SessionStateError("expert ids must be unique")
        total = sum(e.competence for e in roster)
        roster = [Expert(e.id, e.competence / total, e.name) for e in roster]
        session = cls(
            id=session_id or uuid.uuid4().hex[:12],
            token=token or secrets.token_urlsafe(16),
            alternatives=alternatives,
            experts=roster,
            config=config or EngineConfig(),
        )
        session._append_event("created", {
            "alternatives": session.alternatives,
            "experts": [asdict(e) for e in roster],
            "config": _config_to_dict(session.config),
        })
        return session

    # ---- internals ---------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.alternatives)

    def expert_ids(self) -> list[str]:
        return [e.id for e in self.experts]

    def competences(self) -> dict[str, float]:
        return {e.id: e.competence for e in self.experts}

    def _append_event(self, kind: str, data: dict) -> None:
        self.events.append({"seq": len(self.events), "type": kind, "data": data})

    def _registry(self):
        return self.config.registry()

    def _check_version(self, version: int | None) -> None:
        if version is not None and version != self.version:
            raise VersionConflictError(
                f"session is at version {self.version}, request was for {version}"
            )

    def build_pcms(self) -> dict[str, PCM]:
        registry = self._registry()
        unified = registry.unified()
        pcms: dict[str, PCM] = {}
        for expert in self.expert_ids():
            judgments = []
            for record in self.judgments.values():
                if record.expert != expert:
                    continue
                scale = registry.get(record.scale_grades)
                judgments.append(Judgment(
                    expert, record.i, record.j, record.grade, scale, ">",
                ))
            pcms[expert] = build_pcm(judgments, self.n, unified, expert=expert)
        return pcms

    def group_state(self) -> GroupState:
        state = GroupState(self.build_pcms(), self.competences(), self.config)
        state.version = self.version
        return state

    # ---- operations ---------------------------------------------------------

    def submit_judgments(self, submissions: Iterable[Mapping[str, Any]],
                         version: int | None = None) -> int:
        """Add or replace judgments; returns how many records were stored.

        In-batch duplicates for one unordered pair must agree (a disagreement
        in a single submission is a conflict); across batches the new record
        replaces the old one.
        """
        self._check_version(version)
        registry = self._registry()
        unified = registry.unified()
        known = set(self.expert_ids())
        batch: dict[tuple[str, int, int], JudgmentRecord] = {}
        for raw in submissions:
            record = canonical_record(
                str(raw["expert"]), int(raw["i"]), int(raw["j"]),
                float(raw["grade"]), int(raw["scale_grades"]),
                str(raw.get("direction", ">")),
            )
            if record.expert not in known:
                raise InvalidJudgmentError(f"unknown expert {record.expert!r}")
            if not (0 <= record.i < self.n and 0 <= record.j < self.n):
                raise InvalidJudgmentError(
                    f"pair ({record.i}, {record.j}) outside 0..{self.n - 1}"
                )
            scale = registry.get(record.scale_grades)
            to_unified(record.grade, scale, unified)  # grade range check
            key = record.unordered()
            if key in batch and batch[key] != record:
                raise JudgmentConflictError(record.expert, key[1], key[2])
            batch[key] = record
        for key, record in batch.items():
            self.judgments[key] = record
        self.version += 1
        # fresh data invalidates any previous evaluation and open request
        self.status = COLLECTING
        self.open_request = None
        self.results = None
        self._append_event("judgments", {
            "records": [asdict(r) for r in batch.values()],
        })
        return len(batch)

    def evaluate(self) -> Evaluation:
        """Run the pipeline and commit results, status, and an event."""
        state = self.group_state()
        evaluation = state.evaluate()
        self._commit_evaluation(evaluation)
        self._append_event("evaluated", {})
        return evaluation

    def _commit_evaluation(self, evaluation: Evaluation) -> None:
        self.version += 1
        self.open_request = None
        if evaluation.status == INCOMPLETE:
            self.status = INCOMPLETE
            self.results = None
            return
        self.results = SessionResults(
            w=[float(x) for x in evaluation.result.w.w],
            K=[float(x) for x in evaluation.report.K],
            status=evaluation.status,
        )
        if evaluation.status == CONVERGED:
            self.status = CONVERGED
        elif self.round >= self.config.cap:
            self.status = CAPPED
        else:
            self.status = AWAITING_REVISION

    def current_evaluation(self) -> Evaluation:
        """Recompute the pipeline on the current state (never cached)."""
        return self.group_state().evaluate()

    def state_fingerprint(self) -> dict:
        """Deterministic view of the state for replay-consistency checks.

        Randomized identifiers (session id, token, request ids) are excluded;
        everything the evaluation depends on, plus its outputs, is included.
        """
        open_request = None
        if self.open_request is not None:
            open_request = {
                k: v for k, v in self.open_request.items()
                if k not in ("request_id", "state_version")
            }
        return {
            "alternatives": list(self.alternatives),
            "experts": [asdict(e) for e in self.experts],
            "config": _config_to_dict(self.config),
            "judgments": [asdict(r) for r in sorted(
                self.judgments.values(),
                key=lambda r: (r.expert, min(r.i, r.j), max(r.i, r.j)))],
            "results": self.results.to_dict() if self.results else None,
            "status": self.status,
            "round": self.round,
            "version": self.version,
            "declined": [list(x) for x in self.declined_last_round],
            "open_request": open_request,
        }

    def get_revision_request(self) -> dict | None:
        """The open revision request, creating one if evaluation calls for it."""
        if self.status != AWAITING_REVISION:
            return None
        if self.open_request is not None:
            return self.open_request
        evaluation = self.group_state().evaluate()
        if evaluation.report is None or evaluation.report.passing:
            return None
        exclude = {tuple(item) for item in self.declined_last_round}
        try:
            request = select_revision_target(
                self.group_state(), evaluation,
                exclude=exclude, round_number=self.round + 1,
            )
        except NoEligibleCellError:
            return None
        self.open_request = {
            "request_id": uuid.uuid4().hex[:10],
            "expert": request.expert,
            "i": request.i,
            "j": request.j,
            "current_value": request.current_value,
            "suggested_value": request.suggested_value,
            "coordinate": request.coordinate,
            "round": request.round_number,
            "state_version": self.version,
        }
        self._append_event("revision-opened", dict(self.open_request))
        return self.open_request

    def respond_revision(self, request_id: str, action: str,
                         value: float | None = None,
                         scale_grades: int | None = None,
                         version: int | None = None) -> dict:
        """Apply an expert's answer to the open request and re-evaluate."""
        self._check_version(version)
        if self.open_request is None:
            raise StaleRequestError("no revision request is open")
        if self.open_request["request_id"] != request_id:
            raise StaleRequestError(f"request {request_id!r} is not the open one")
        open_request = self.open_request
        unified_grades = self._registry().unified().grades
        self.round += 1
        if action == DECLINE:
            self.declined_last_round = [[
                open_request["expert"], open_request["i"], open_request["j"],
            ]]
            self.open_request = None
            self.version += 1
            if self.round >= self.config.cap:
                self.status = CAPPED
            self._append_event("revision-answered", {
                "request_id": request_id, "action": DECLINE,
            })
            return {"applied": False, "status": self.status}

        if action == ACCEPT:
            ratio = float(open_request["suggested_value"])
        elif action == VALUE:
            if value is None or value <= 0:
                raise InvalidJudgmentError("a value response needs a positive ratio")
            ratio = float(value)
        else:
            raise InvalidJudgmentError(f"unknown revision action {action!r}")

        i, j = open_request["i"], open_request["j"]
        direction = ">" if float(open_request["current_value"]) >= 1 else "<"
        if scale_grades is not None:
            # a value paired with a scale is a re-graded judgment: store the
            # grade index on that scale, keep the cell's current direction
            registry = self._registry()
            to_unified(ratio, registry.get(scale_grades), registry.unified())
            record = canonical_record(
                open_request["expert"], i, j, ratio, scale_grades, direction)
        else:
            # a bare ratio lives on the unified scale, where grade == value;
            # its own size decides which alternative dominates
            magnitude = ratio if ratio >= 1 else 1.0 / ratio
            record = canonical_record(
                open_request["expert"], i, j, magnitude, unified_grades,
                ">" if ratio >= 1 else "<")
        self.judgments[record.unordered()] = record
        self.declined_last_round = []
        self.open_request = None
        self._append_event("revision-answered", {
            "request_id": request_id, "action": action,
            "value": value, "scale_grades": scale_grades,
        })
        evaluation = self.group_state().evaluate()
        self._commit_evaluation(evaluation)
        return {"applied": True, "status": self.status}

    # ---- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "id": self.id,
            "token": self.token,
            "alternatives": list(self.alternatives),
            "experts": [asdict(e) for e in self.experts],
            "config": _config_to_dict(self.config),
            "judgments": [asdict(r) for r in sorted(
                self.judgments.values(), key=lambda r: (r.expert, min(r.i, r.j), max(r.i, r.j))
            )],
            "results": self.results.to_dict() if self.results else None,
            "status": self.status,
            "round": self.round,
            "open_request": self.open_request,
            "declined": self.declined_last_round,
            "events": self.events,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Session":
        config = _config_from_dict(data.get("config", {}))
        session = cls(
            id=data["id"],
            token=data.get("token", ""),
            alternatives=list(data["alternatives"]),
            experts=[Expert(**e) for e in data["experts"]],
            config=config,
            status=data.get("status", COLLECTING),
            version=int(data.get("version", 0)),
            round=int(data.get("round", 0)),
            open_request=data.get("open_request"),
            declined_last_round=[list(x) for x in data.get("declined", [])],
            events=list(data.get("events", [])),
        )
        registry = config.registry()
        unified = registry.unified()
        for raw in data.get("judgments", []):
            record = JudgmentRecord(
                raw["expert"], int(raw["i"]), int(raw["j"]),
                float(raw["grade"]), int(raw["scale_grades"]),
            )
            key = record.unordered()
            existing = session.judgments.get(key)
            if existing is not None:
                def oriented(r):
                    value = float(to_unified(
                        r.grade, registry.get(r.scale_grades), unified))
                    return value if r.i < r.j else 1.0 / value
                if abs(oriented(existing) - oriented(record)) > 1e-9 * oriented(existing):
                    raise JudgmentConflictError(record.expert, key[1], key[2])
            session.judgments[key] = record
        results = data.get("results")
        if results:
            session.results = SessionResults(
                [float(x) for x in results["w"]],
                [float(x) for x in results["K"]],
                results["status"],
            )
        return session

    def results_bytes(self) -> bytes:
        """Canonical serialization of the evaluation results.

        The CLI and the service both report through this function, so equal
        session states produce byte-identical result documents.
        """
        payload = self.results.to_dict() if self.results else None
        return json.dumps({"results": payload}, sort_keys=True,
                          separators=(",", ":")).encode()


def _config_to_dict(config: EngineConfig) -> dict:
    return {
        "epsilon": config.epsilon,
        "threshold": config.threshold,
        "cap": config.cap,
        "mean": config.mean,
        "scale_grades": list(config.scale_grades),
        "spectrum_grades": config.spectrum_grades,
        "revision_floor": config.revision_floor,
        "strict_scale_weight": config.strict_scale_weight,
    }


def _config_from_dict(data: Mapping[str, Any]) -> EngineConfig:
    mean = data.get("mean", "geometric")
    if mean not in MEANS:
        raise SessionStateError(f"unknown aggregation mean {mean!r}")
    return EngineConfig(
        epsilon=float(data.get("epsilon", 0.01)),
        threshold=float(data.get("threshold", 0.7)),
        cap=int(data.get("cap", 50)),
        mean=mean,
        scale_grades=tuple(data.get("scale_grades", (2, 3, 5, 7, 9))),
        spectrum_grades=data.get("spectrum_grades"),
        strict_scale_weight=bool(data.get("strict_scale_weight", False)),
        revision_floor=float(data.get("revision_floor", 0.05)),
    )


def replay_events(events: Iterable[Mapping[str, Any]]) -> Session:
    """Rebuild a session by replaying its event log from the beginning.

    Deterministic steps (evaluation, revision targeting) are re-derived, not
    read back, so replay doubles as a consistency check of the log.
    """
    session: Session | None = None
    for event in events:
        kind, data = event["type"], event["data"]
        if kind == "created":
            session = Session.create(
                data["alternatives"],
                data["experts"],
                _config_from_dict(data["config"]),
            )
        elif session is None:
            raise SessionStateError("event log does not start with session creation")
        elif kind == "judgments":
            session.submit_judgments(data["records"])
        elif kind == "evaluated":
            session.evaluate()
        elif kind == "revision-opened":
            opened = session.get_revision_request()
            if opened is None:
                raise SessionStateError("replay could not re-derive an open request")
        elif kind == "revision-answered":
            if session.open_request is None:
                session.get_revision_request()
            session.respond_revision(
                session.open_request["request_id"],
                data["action"],
                value=data.get("value"),
                scale_grades=data.get("scale_grades"),
            )
        else:
            raise SessionStateError(f"unknown event type {kind!r}")
    if session is None:
        raise SessionStateError("empty event log")
    return session


class SessionStore:
    """One JSON document per session in a directory; atomic writes."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)

    def path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def save(self, session: Session) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        target = self.path(session.id)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(session.to_dict(), fh, indent=2)
                fh.write("\n")
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return target

    def load(self, session_id: str) -> Session:
        path = self.path(session_id)
        if not path.exists():
            raise UnknownSessionError(session_id)
        with open(path) as fh:
            return Session.from_dict(json.load(fh))

    def load_file(self, path: str | Path) -> Session:
        with open(path) as fh:
            return Session.from_dict(json.load(fh))

    def ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))
