"""HTTP session API over a workspace; the designer console talks to this.

Every mutating endpoint performs exactly one engine operation and requires
the caller to echo the system's current revision number; a mismatch is
answered with 409 so stale clients refresh instead of clobbering.  Requests
for one workspace are serialised by a lock: revisions are the only
concurrency token clients need.
"""
from __future__ import annotations

import threading
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from . import dot, logic, recovery, workspace as ws_mod
from .productions import apply_asserted, find_matches
from .recovery import (Abandon, AcceptProduction, Iterate, Parse, RecoverySession,
                       SessionError, SessionState)
from .reconfig import ReconfigError, apply_reconfiguration, find_rule_matches
from .tracking import TrackedSystem, record_production
from .workspace import Workspace, graph_to_json, save_workspace, system_to_json


class ApplyBody(BaseModel):
    revision: int
    edge: int


class RuleMatchesBody(BaseModel):
    revision: Optional[int] = None


class RuleApplyBody(BaseModel):
    revision: int
    root: int


class RecoveryStartBody(BaseModel):
    revision: int
    invariant: Optional[str] = None


class DecisionBody(BaseModel):
    revision: int
    kind: str
    production: Optional[str] = None
    edge: Optional[int] = None
    parent: Optional[int] = None


def forest_to_json(s: TrackedSystem) -> dict:
    return {
        "roots": list(s.forest.roots),
        "vertices": [
            {
                "id": v,
                "children": list(s.forest.children(v)),
                "label": s.vertex_label(v),
                "edge": (s.record(v).edge if s.record(v) else None),
                "nodes": (list(s.record(v).nodes) if s.record(v) else None),
                "tau": (s.record(v).tau if s.record(v) else None),
                "production": s.production_at(v),
                "synthetic": bool(s.record(v) and s.record(v).synthetic),
                "tombstone": s.is_tombstone(v),
                "leaf": s.forest.is_leaf(v),
            }
            for v in s.forest.vertices()
        ],
    }


class WorkspaceService:
    """Mutable server state: the workspace, per-system revisions and at
    most one recovery session per system."""

    def __init__(self, ws: Workspace, path: str | None = None):
        self.ws = ws
        self.path = path
        self.lock = threading.Lock()
        self.revisions = {name: 0 for name in ws.systems}
        self.sessions: dict[str, RecoverySession] = {}

    def system(self, sid: str) -> TrackedSystem:
        if sid not in self.ws.systems:
            raise HTTPException(404, f"unknown system {sid!r}")
        return self.ws.systems[sid]

    def check_revision(self, sid: str, revision: int) -> None:
        if revision != self.revisions[sid]:
            raise HTTPException(
                409, f"stale revision {revision}, system is at {self.revisions[sid]}")

    def commit(self, sid: str, system: TrackedSystem) -> int:
        self.ws.systems[sid] = system
        self.revisions[sid] += 1
        if self.path:
            save_workspace(self.ws, self.path)
        return self.revisions[sid]


def build_app(ws: Workspace, path: str | None = None) -> FastAPI:
    svc = WorkspaceService(ws, path)
    app = FastAPI(title="design rewriting workspace")
    app.state.service = svc

    def with_revision(sid: str, payload: dict) -> dict:
        payload["revision"] = svc.revisions[sid]
        return payload

    @app.get("/workspace")
    def get_workspace():
        with svc.lock:
            doc = ws_mod.workspace_to_json(svc.ws)
            doc["revisions"] = dict(svc.revisions)
            return doc

    @app.get("/systems/{sid}/graph")
    def get_graph(sid: str):
        with svc.lock:
            s = svc.system(sid)
            return with_revision(sid, {"graph": graph_to_json(s.graph)})

    @app.get("/systems/{sid}/forest")
    def get_forest(sid: str):
        with svc.lock:
            s = svc.system(sid)
            return with_revision(sid, {"forest": forest_to_json(s)})

    @app.get("/systems/{sid}/graph.dot", response_class=PlainTextResponse)
    def get_graph_dot(sid: str):
        with svc.lock:
            s = svc.system(sid)
            session = svc.sessions.get(sid)
            highlight = list(session.witness.edges) if session and session.witness else []
            marked = session.marked_edges() if session else []
            return dot.graph_dot(s.graph, highlight, marked)

    @app.get("/systems/{sid}/forest.dot", response_class=PlainTextResponse)
    def get_forest_dot(sid: str):
        with svc.lock:
            return dot.forest_dot(svc.system(sid))

    @app.post("/systems/{sid}/productions/{name}/apply")
    def post_apply(sid: str, name: str, body: ApplyBody):
        with svc.lock:
            s = svc.system(sid)
            svc.check_revision(sid, body.revision)
            if name not in svc.ws.asserted:
                raise HTTPException(404, f"unknown production {name!r}")
            ap = svc.ws.asserted[name]
            m = next((m for m in find_matches(s.graph, ap.production) if m.edge == body.edge), None)
            if m is None:
                raise HTTPException(409, f"production {name!r} does not match edge {body.edge}")
            outcome = apply_asserted(s.graph, ap, m, s.alloc.clone())
            if not outcome.ok:
                raise HTTPException(422, detail={
                    "violation": outcome.violation.message,
                    "assignment": outcome.violation.assignment})
            s2 = record_production(s, ap.production, m)
            svc.sessions.pop(sid, None)
            rev = svc.commit(sid, s2)
            return {"graph": graph_to_json(s2.graph), "revision": rev}

    @app.post("/systems/{sid}/rules/{name}/matches")
    def post_rule_matches(sid: str, name: str, body: RuleMatchesBody):
        with svc.lock:
            s = svc.system(sid)
            if name not in svc.ws.rules:
                raise HTTPException(404, f"unknown rule {name!r}")
            matches = find_rule_matches(s, svc.ws.rules[name])
            return with_revision(sid, {"matches": matches})

    @app.post("/systems/{sid}/rules/{name}/apply")
    def post_rule_apply(sid: str, name: str, body: RuleApplyBody):
        with svc.lock:
            s = svc.system(sid)
            svc.check_revision(sid, body.revision)
            if name not in svc.ws.rules:
                raise HTTPException(404, f"unknown rule {name!r}")
            try:
                s2 = apply_reconfiguration(s, svc.ws.rules[name], body.root,
                                           svc.ws.type_graph, svc.ws.productions)
            except ReconfigError as exc:
                raise HTTPException(409, str(exc)) from exc
            svc.sessions.pop(sid, None)
            rev = svc.commit(sid, s2)
            return {"graph": graph_to_json(s2.graph), "revision": rev}

    @app.post("/systems/{sid}/recovery/start")
    def post_recovery_start(sid: str, body: RecoveryStartBody):
        with svc.lock:
            s = svc.system(sid)
            svc.check_revision(sid, body.revision)
            if body.invariant is not None:
                try:
                    inv = logic.parse_formula(body.invariant, svc.ws.type_graph)
                except logic.FormulaError as exc:
                    raise HTTPException(400, str(exc)) from exc
            elif svc.ws.invariant is not None:
                inv = svc.ws.invariant
            else:
                raise HTTPException(400, "no invariant given and none in the workspace")
            try:
                session = recovery.start_recovery(s, inv, svc.ws.type_graph, svc.ws.productions)
            except logic.FormulaError as exc:
                raise HTTPException(400, str(exc)) from exc
            svc.sessions[sid] = session
            return with_revision(sid, recovery.session_payload(session))

    @app.get("/systems/{sid}/recovery")
    def get_recovery(sid: str):
        with svc.lock:
            svc.system(sid)
            session = svc.sessions.get(sid)
            if session is None:
                raise HTTPException(404, "no recovery session")
            return with_revision(sid, recovery.session_payload(session))

    @app.get("/systems/{sid}/recovery/candidates")
    def get_candidates(sid: str):
        with svc.lock:
            svc.system(sid)
            session = svc.sessions.get(sid)
            if session is None:
                raise HTTPException(404, "no recovery session")
            if session.state is SessionState.VIOLATED:
                session = recovery.propose_productions(session)
                svc.sessions[sid] = session
            payload = recovery.session_payload(session)
            return with_revision(sid, {
                "state": payload["state"],
                "candidates": payload["candidates"],
                "parse_candidates": payload["parse_candidates"],
            })

    @app.post("/systems/{sid}/recovery/decision")
    def post_decision(sid: str, body: DecisionBody):
        with svc.lock:
            svc.system(sid)
            svc.check_revision(sid, body.revision)
            session = svc.sessions.get(sid)
            if session is None:
                raise HTTPException(404, "no recovery session")
            decision = _decision_of(body)
            system_before = session.system
            try:
                session = recovery.decide(session, decision)
            except SessionError as exc:
                raise HTTPException(409, str(exc)) from exc
            svc.sessions[sid] = session
            if session.system is not system_before:
                svc.commit(sid, session.system)
            return with_revision(sid, recovery.session_payload(session))

    return app


def _decision_of(body: DecisionBody):
    if body.kind == "accept":
        if body.production is None or body.edge is None:
            raise HTTPException(400, "accept needs production and edge")
        return AcceptProduction(body.production, body.edge)
    if body.kind == "iterate":
        if body.production is None or body.edge is None:
            raise HTTPException(400, "iterate needs production and edge")
        return Iterate(body.production, body.edge)
    if body.kind == "parse":
        return Parse(body.parent)
    if body.kind == "abandon":
        return Abandon()
    raise HTTPException(400, f"unknown decision kind {body.kind!r}")


def serve(ws: Workspace, port: int, path: str | None = None, host: str = "127.0.0.1") -> None:
    import uvicorn

    uvicorn.run(build_app(ws, path), host=host, port=port, log_level="warning")
