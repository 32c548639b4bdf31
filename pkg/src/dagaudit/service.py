"""Session HTTP API for the interactive model-building loop.

Sessions are held in memory; persistence is the analyst's call via
export/import documents. Branch ids are content hashes, so checklist
statuses survive regeneration whenever a branch reappears unchanged; a
per-session generation counter detects references from a superseded result.
Mutations on one session are serialized behind a lock, reads are free.
"""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from typing import Any, Optional

from fastapi import Body, FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse

from . import adoption, branchgen, overlay as overlay_mod, parser
from .model import STATUS_NAMES, DagParseError, RootDag

EXPORT_VERSION = 1


@dataclass
class SessionState:
    session_id: str
    root: RootDag
    result: branchgen.AuditResult
    statuses: dict[str, tuple[str, str]] = field(default_factory=dict)
    history: list[tuple[str, str]] = field(default_factory=list)  # (branch_id, prior root text)
    generation: int = 0
    seen_ids: set[str] = field(default_factory=set)
    lock: threading.Lock = field(default_factory=threading.Lock)


def _error(status: int, code: str, message: str, details: Any = None) -> JSONResponse:
    return JSONResponse(
        {"error": {"code": code, "message": message, "details": details}}, status_code=status
    )


def create_app() -> FastAPI:
    app = FastAPI(title="dagaudit session service")
    # single-user desk tool; the browser companion runs on another port
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, SessionState] = {}

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError) -> JSONResponse:
        return _error(400, "malformed-request", "request body failed validation", exc.errors())

    def result_payload(state: SessionState) -> dict:
        doc = overlay_mod.result_to_dict(state.result, state.statuses)
        doc["generation"] = state.generation
        return doc

    def make_session(root: RootDag) -> SessionState:
        result = branchgen.generate(root)
        state = SessionState(uuid.uuid4().hex[:12], root, result)
        state.seen_ids.update(result.branch_ids())
        sessions[state.session_id] = state
        return state

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict = Body(...)):
        text = body.get("dag_text")
        if not isinstance(text, str):
            return _error(400, "missing-field", "body must contain string field 'dag_text'")
        try:
            root = parser.parse_dag(text)
        except DagParseError as exc:
            return _error(400, "parse-error", exc.message, {"line": exc.line, "col": exc.col})
        diagnostics = parser.validate_root(root)
        errors = [d for d in diagnostics if d.level == "error"]
        if errors:
            return _error(
                400,
                "validation-error",
                "root graph failed validation",
                [{"code": d.code, "message": d.message} for d in errors],
            )
        state = make_session(root)
        return JSONResponse(
            {"session_id": state.session_id, "result": result_payload(state)}, status_code=201
        )

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "unknown-session", f"no session {session_id!r}")
        current = set(state.result.branch_ids())
        return {
            "result": result_payload(state),
            "statuses": {
                bid: {"status": s, "note": n}
                for bid, (s, n) in sorted(state.statuses.items())
                if bid in current
            },
            "history": [
                {"step": i, "branch_id": bid} for i, (bid, _) in enumerate(state.history)
            ],
        }

    @app.post("/sessions/{session_id}/adopt")
    async def adopt_branch(session_id: str, body: dict = Body(...)):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "unknown-session", f"no session {session_id!r}")
        branch_id = body.get("branch_id")
        if not isinstance(branch_id, str):
            return _error(400, "missing-field", "body must contain string field 'branch_id'")
        options = body.get("options") or {}
        expected_gen = body.get("generation")
        with state.lock:
            if expected_gen is not None and expected_gen != state.generation:
                return _error(
                    409,
                    "stale-generation",
                    f"request was prepared against generation {expected_gen}, "
                    f"session is at {state.generation}",
                )
            current = set(state.result.branch_ids())
            if branch_id not in current:
                if branch_id in state.seen_ids:
                    return _error(
                        409, "stale-branch", f"branch {branch_id!r} is from a prior generation"
                    )
                return _error(404, "unknown-branch", f"no branch {branch_id!r} in current result")
            try:
                new_root = adoption.adopt(
                    state.root,
                    state.result,
                    branch_id,
                    name=options.get("name"),
                    leave_unadjusted=bool(options.get("leave_unadjusted")),
                )
            except ValueError as exc:
                return _error(400, "invalid-options", str(exc))
            state.history.append((branch_id, parser.emit_dag(state.root)))
            state.root = new_root
            state.result = branchgen.generate(new_root)
            state.generation += 1
            state.seen_ids.update(state.result.branch_ids())
            return {"result": result_payload(state)}

    @app.post("/sessions/{session_id}/undo")
    async def undo(session_id: str):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "unknown-session", f"no session {session_id!r}")
        with state.lock:
            if not state.history:
                return _error(409, "nothing-to-undo", "session has no adoption history")
            _, prior_text = state.history.pop()
            state.root = parser.parse_dag(prior_text)
            state.result = branchgen.generate(state.root)
            state.generation += 1
            state.seen_ids.update(state.result.branch_ids())
            return {"result": result_payload(state)}

    @app.put("/sessions/{session_id}/checklist/{branch_id}")
    async def set_status(session_id: str, branch_id: str, body: dict = Body(...)):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "unknown-session", f"no session {session_id!r}")
        status = body.get("status")
        note = body.get("note", "")
        if status not in STATUS_NAMES:
            return _error(
                422, "invalid-status", f"status must be one of {', '.join(STATUS_NAMES)}"
            )
        if not isinstance(note, str):
            return _error(422, "invalid-note", "note must be a string")
        with state.lock:
            if branch_id not in set(state.result.branch_ids()):
                return _error(404, "unknown-branch", f"no branch {branch_id!r} in current result")
            state.statuses[branch_id] = (status, note)
            items = overlay_mod.checklist(state.result, state.statuses)
            item = next(i for i in items if i.id == branch_id)
            return {
                "item": {
                    "id": item.id,
                    "statement": item.statement,
                    "classification": item.classification,
                    "status": item.status,
                    "note": item.note,
                }
            }

    @app.get("/sessions/{session_id}/overlay.dot")
    async def overlay_dot(session_id: str, mode: str = "collapsed"):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "unknown-session", f"no session {session_id!r}")
        if mode not in ("collapsed", "expanded"):
            return _error(400, "invalid-mode", "mode must be 'collapsed' or 'expanded'")
        ov = overlay_mod.build_overlay(state.result, mode)
        return PlainTextResponse(overlay_mod.overlay_to_dot(ov))

    @app.get("/sessions/{session_id}/export")
    async def export_session(session_id: str):
        state = sessions.get(session_id)
        if state is None:
            return _error(404, "unknown-session", f"no session {session_id!r}")
        return {
            "version": EXPORT_VERSION,
            "root_text": parser.emit_dag(state.root),
            "history": [
                {"branch_id": bid, "prior_root_text": text} for bid, text in state.history
            ],
            "statuses": {
                bid: {"status": s, "note": n} for bid, (s, n) in sorted(state.statuses.items())
            },
        }

    @app.post("/sessions/import", status_code=201)
    async def import_session(body: dict = Body(...)):
        if body.get("version") != EXPORT_VERSION:
            return _error(
                400, "unsupported-version", f"expected document version {EXPORT_VERSION}"
            )
        root_text = body.get("root_text")
        history = body.get("history", [])
        statuses = body.get("statuses", {})
        if not isinstance(root_text, str) or not isinstance(history, list) or not isinstance(statuses, dict):
            return _error(400, "malformed-document", "root_text/history/statuses have wrong types")
        try:
            root = parser.parse_dag(root_text)
            prior_roots = [parser.parse_dag(h["prior_root_text"]) for h in history]
        except (DagParseError, KeyError, TypeError) as exc:
            return _error(400, "malformed-document", f"embedded graph text failed to parse: {exc}")
        for entry in statuses.values():
            if not isinstance(entry, dict) or entry.get("status") not in STATUS_NAMES:
                return _error(400, "malformed-document", "statuses must map ids to {status, note}")
        state = make_session(root)
        state.history = [(h["branch_id"], h["prior_root_text"]) for h in history]
        state.statuses = {bid: (e["status"], e.get("note", "")) for bid, e in statuses.items()}
        state.generation = len(state.history)
        for prior in prior_roots:
            state.seen_ids.update(branchgen.generate(prior).branch_ids())
        return JSONResponse(
            {"session_id": state.session_id, "result": result_payload(state)}, status_code=201
        )

    return app
