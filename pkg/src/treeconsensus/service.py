"""HTTP facade over facilitation sessions.

Resources:
    POST /sessions                      new session (returns doc incl. token)
    GET  /sessions/{id}                 current session document
    PUT  /sessions/{id}/judgments       add/replace judgments (bare list body)
    POST /sessions/{id}/evaluate        run the pipeline, commit results
    GET  /sessions/{id}/agreement       report: K, w, completeness, spectrums
    GET  /sessions/{id}/revision        the open revision request, if any
    POST /sessions/{id}/revision        answer the open request

All session-scoped routes require the session token (query ?token=... or
X-Session-Token header). State is one JSON document per session on disk;
every handler takes the per-session lock, so writers are serialized while
different sessions proceed independently.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Header, HTTPException, Query
from pydantic import BaseModel, Field

from .engine import INCOMPLETE
from .errors import (
    DecisionError,
    InvalidJudgmentError,
    JudgmentConflictError,
    SessionStateError,
    StaleRequestError,
    UnknownSessionError,
    VersionConflictError,
)
from .session import Session, SessionStore, _config_from_dict

DEFAULT_DATA_DIR = os.environ.get("TREECONSENSUS_DATA", "./sessions")


class ExpertIn(BaseModel):
    id: str
    name: str = ""
    competence: float = 1.0


class CreateSessionIn(BaseModel):
    alternatives: list[str]
    experts: list[ExpertIn]
    config: dict[str, Any] = Field(default_factory=dict)


class JudgmentIn(BaseModel):
    expert: str
    i: int
    j: int
    grade: float
    scale_grades: int
    direction: str = ">"


class RevisionIn(BaseModel):
    request_id: str
    action: str
    value: float | None = None
    scale_grades: int | None = None
    version: int | None = None


def _http_error(exc: DecisionError) -> HTTPException:
    if isinstance(exc, UnknownSessionError):
        return HTTPException(404, f"unknown session {exc.args[0]!r}")
    if isinstance(exc, (VersionConflictError, StaleRequestError, JudgmentConflictError)):
        return HTTPException(409, str(exc))
    if isinstance(exc, (InvalidJudgmentError, SessionStateError)):
        return HTTPException(422, str(exc))
    return HTTPException(400, str(exc))


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    store = SessionStore(data_dir or DEFAULT_DATA_DIR)
    app = FastAPI(title="treeconsensus", version="0.1.0")
    locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def lock_for(session_id: str) -> threading.Lock:
        with locks_guard:
            return locks.setdefault(session_id, threading.Lock())

    def load_checked(session_id: str, token: str | None, header_token: str | None) -> Session:
        try:
            session = store.load(session_id)
        except UnknownSessionError as exc:
            raise _http_error(exc) from exc
        supplied = token or header_token
        if session.token and supplied != session.token:
            raise HTTPException(401, "missing or wrong session token")
        return session

    def agreement_payload(session: Session) -> dict:
        evaluation = session.current_evaluation()
        payload: dict[str, Any] = {
            "status": evaluation.status,
            "session_status": session.status,
            "round": session.round,
            "completeness": {
                "connected": evaluation.completeness.connected,
                "union_connected": evaluation.completeness.union_connected,
                "components": evaluation.completeness.components,
                "suggested_edges": evaluation.completeness.suggested_edges,
            },
        }
        if evaluation.status != INCOMPLETE:
            report = evaluation.report
            payload.update({
                "K": [float(x) for x in report.K],
                "threshold": report.threshold,
                "passing": report.passing,
                "worst_coordinate": report.worst_coordinate,
                "w": [float(x) for x in evaluation.result.w.w],
                "tree_count": evaluation.tree_count,
                "replica_count": evaluation.result.replica_count,
                "spectrums": [
                    {
                        "coordinate": coord,
                        "grades": spectrum.grades,
                        "rows": [[g, spectrum.mass[g]] for g in spectrum.support()],
                    }
                    for coord, spectrum in enumerate(report.spectrums)
                ],
            })
        return payload

    @app.get("/healthz")
    def health() -> dict:
        return {"ok": True}

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionIn) -> dict:
        try:
            config = _config_from_dict(body.config)
            session = Session.create(
                body.alternatives,
                [e.model_dump() for e in body.experts],
                config,
            )
        except (DecisionError, ValueError) as exc:
            if isinstance(exc, DecisionError):
                raise _http_error(exc) from exc
            raise HTTPException(422, str(exc)) from exc
        store.save(session)
        return session.to_dict()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str, token: str | None = Query(None),
                    x_session_token: str | None = Header(None)) -> dict:
        with lock_for(session_id):
            return load_checked(session_id, token, x_session_token).to_dict()

    @app.put("/sessions/{session_id}/judgments")
    def put_judgments(session_id: str, body: list[JudgmentIn],
                      version: int | None = Query(None),
                      token: str | None = Query(None),
                      x_session_token: str | None = Header(None)) -> dict:
        with lock_for(session_id):
            session = load_checked(session_id, token, x_session_token)
            try:
                count = session.submit_judgments(
                    [j.model_dump() for j in body], version=version,
                )
            except DecisionError as exc:
                raise _http_error(exc) from exc
            store.save(session)
            return {"stored": count, "version": session.version,
                    "status": session.status}

    @app.post("/sessions/{session_id}/evaluate")
    def evaluate(session_id: str, token: str | None = Query(None),
                 x_session_token: str | None = Header(None)) -> dict:
        with lock_for(session_id):
            session = load_checked(session_id, token, x_session_token)
            try:
                session.evaluate()
            except DecisionError as exc:
                raise _http_error(exc) from exc
            store.save(session)
            payload = agreement_payload(session)
            payload["version"] = session.version
            payload["results"] = session.results.to_dict() if session.results else None
            return payload

    @app.get("/sessions/{session_id}/agreement")
    def get_agreement(session_id: str, token: str | None = Query(None),
                      x_session_token: str | None = Header(None)) -> dict:
        with lock_for(session_id):
            session = load_checked(session_id, token, x_session_token)
            return agreement_payload(session)

    @app.get("/sessions/{session_id}/revision")
    def get_revision(session_id: str, token: str | None = Query(None),
                     x_session_token: str | None = Header(None)) -> dict:
        with lock_for(session_id):
            session = load_checked(session_id, token, x_session_token)
            before = session.version, len(session.events)
            request = session.get_revision_request()
            if (session.version, len(session.events)) != before:
                store.save(session)
            return {"request": request, "version": session.version,
                    "status": session.status}

    @app.post("/sessions/{session_id}/revision")
    def respond_revision(session_id: str, body: RevisionIn,
                         token: str | None = Query(None),
                         x_session_token: str | None = Header(None)) -> dict:
        with lock_for(session_id):
            session = load_checked(session_id, token, x_session_token)
            try:
                outcome = session.respond_revision(
                    body.request_id, body.action,
                    value=body.value, scale_grades=body.scale_grades,
                    version=body.version,
                )
            except DecisionError as exc:
                raise _http_error(exc) from exc
            store.save(session)
            outcome["version"] = session.version
            outcome["results"] = session.results.to_dict() if session.results else None
            return outcome

    ui_dir = os.environ.get("TREECONSENSUS_UI", "frontend/dist")
    if Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


app = create_app()
