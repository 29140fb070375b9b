"""HTTP façade: documents, per-session commands, anchors, audit, health.

Sessions are in-memory with a TTL; command handling per session is
serialized (FIFO) while documents stay immutable after ingest. The audit
log is the only persistent artifact: append-only NDJSON, fsynced per
record, carrying structured commands and anchor IDs only. Every anchor_id
in any response resolves against the document's anchor list; the handler
verifies this before answering, so an ungrounded reference is a hard
internal error rather than a quiet lie.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.responses import PlainTextResponse, Response
from pydantic import BaseModel

from . import router
from .config import ServiceConfig, load_config
from .dense import BuiltinEmbedder, HttpEmbeddingProvider
from .engine import (DocumentBundle, EngineConfig, EngineResult, EvidenceEmpty,
                     NavContext, NavEngine)
from .errors import (AnchorNavError, DuplicateDocument, EmptyDocument,
                     MissingDocument, OverlapError, SchemaViolation)
from .fusion import Candidate, FusionConfig
from .router import HttpBackoffClient, Intent, StubBackoff

AUDIT_FIELDS = ("ts", "session_id", "doc_id", "intent_kind", "slots", "decision",
                "anchor_ids")


class CommandRequest(BaseModel):
    transcript: str
    confirm: bool = False
    session_id: str | None = None
    # Per-request fusion overrides (eval harness ablations).
    alpha: float | None = None
    tau: float | None = None
    delta: float | None = None
    top_k: int | None = None


@dataclass
class Session:
    session_id: str
    doc_id: str
    breadcrumb: deque[str]
    current_anchor: str | None = None
    pending: Intent | None = None
    evidence: tuple[Candidate, ...] = ()
    hit_cursor: int = -1
    last_active: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class AuditLog:
    """Append-only NDJSON audit trail; one fsynced record per executed command."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._records: list[dict] = []
        self._lock = threading.Lock()

    def append(self, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":"))
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._records.append(record)

    def records(self, session_id: str | None = None) -> list[dict]:
        with self._lock:
            if session_id is None:
                return list(self._records)
            return [r for r in self._records if r["session_id"] == session_id]


def _build_engine(config: ServiceConfig) -> NavEngine:
    scope_keywords = None
    if config.scope_keywords_path:
        scope_keywords = json.loads(Path(config.scope_keywords_path).read_text("utf-8"))
    engine_config = EngineConfig(
        window_width=config.window_width,
        window_stride=config.window_stride,
        fusion=FusionConfig(alpha=config.alpha, top_k=config.top_k,
                            abstain_threshold=config.tau,
                            disambiguation_margin=config.delta),
        k1=config.k1,
        b=config.b,
        boosts=config.boosts,
        synopsis_k=config.synopsis_k,
        scopes=config.scopes,
        scope_keywords=scope_keywords,
    )
    if config.embedding_url:
        provider = HttpEmbeddingProvider(config.embedding_url,
                                         dimension=config.embedding_dim,
                                         timeout=config.embedding_timeout)
    else:
        provider = BuiltinEmbedder(dimension=config.embedding_dim)
    return NavEngine(engine_config, provider=provider)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    config = config or load_config()
    app = FastAPI(title="anchornav", version="0.1.0")
    engine = _build_engine(config)
    backoff = (HttpBackoffClient(config.backoff_url, timeout=config.backoff_timeout)
               if config.backoff_url else StubBackoff())
    audit = AuditLog(config.audit_path)
    sessions: dict[tuple[str, str], Session] = {}
    sessions_lock = threading.Lock()

    app.state.engine = engine
    app.state.audit = audit
    app.state.config = config

    def get_session(doc_id: str, session_id: str | None) -> Session:
        sid = session_id or "default"
        key = (doc_id, sid)
        now = time.monotonic()
        with sessions_lock:
            session = sessions.get(key)
            if session is not None and now - session.last_active > config.session_ttl_seconds:
                del sessions[key]
                session = None
            if session is None:
                session = Session(session_id=sid, doc_id=doc_id,
                                  breadcrumb=deque(maxlen=config.breadcrumb_cap))
                sessions[key] = session
            session.last_active = now
            return session

    def verify_grounding(bundle: DocumentBundle, action: dict) -> None:
        ids: list[str] = []
        if "anchor_id" in action:
            ids.append(action["anchor_id"])
        ids.extend(action.get("highlight_ids", ()))
        for c in action.get("candidates", ()):
            ids.append(c["anchor_id"])
        for line in action.get("synopsis", {}).get("lines", ()):
            ids.extend(line["anchor_ids"])
        unknown = [i for i in ids if i not in bundle.record.anchors_by_id]
        if unknown:
            raise RuntimeError(f"ungrounded anchor ids in response: {unknown}")

    def candidate_payload(bundle: DocumentBundle, c: Candidate) -> dict:
        anchor = bundle.record.anchors_by_id[c.anchor_id]
        preview = bundle.record.text_of(anchor)
        return {
            "anchor_id": c.anchor_id,
            "fused": c.fused,
            "lexical_norm": c.lexical_norm,
            "dense_norm": c.dense_norm,
            "page": anchor.page,
            "ordinal": anchor.ordinal,
            "snippet": {"start": c.snippet.start, "end": c.snippet.end} if c.snippet else None,
            "preview": preview[:120],
        }

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "documents": len(engine.doc_ids)}

    @app.post("/documents", status_code=201)
    def upload_document(payload: dict = Body(...)) -> dict:
        try:
            bundle = engine.ingest(payload)
        except DuplicateDocument as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (SchemaViolation, OverlapError, EmptyDocument) as exc:
            raise HTTPException(status_code=400,
                                detail={"error": type(exc).__name__, "message": str(exc)})
        return {
            "doc_id": bundle.doc_id,
            "anchor_count": len(bundle.record.anchors),
            "page_count": bundle.record.page_count,
        }

    @app.get("/documents/{doc_id}/anchors")
    def list_anchors(doc_id: str) -> list[dict]:
        try:
            bundle = engine.get(doc_id)
        except MissingDocument as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        out = []
        for a in bundle.record.anchors:
            entry = {
                "anchor_id": a.anchor_id,
                "type": a.type,
                "page": a.page,
                "bboxes": [{"page": b.page, "x0": b.x0, "y0": b.y0,
                            "x1": b.x1, "y1": b.y1} for b in a.bboxes],
                "char_range": {"start": a.char_range.start, "end": a.char_range.end},
                "ordinal": a.ordinal,
                "section_path": list(a.section_path),
                "text": bundle.record.text_of(a),
            }
            if a.table is not None:
                entry["table"] = {"table_id": a.table.table_id, "row": a.table.row,
                                  "col": a.table.col, "rowspan": a.table.rowspan,
                                  "colspan": a.table.colspan}
            out.append(entry)
        return out

    @app.get("/documents/{doc_id}/synopsis")
    def get_synopsis(doc_id: str, scope: str = "document") -> dict:
        try:
            bundle = engine.get(doc_id)
        except MissingDocument as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        synopsis = bundle.synopses.get(scope)
        if synopsis is None:
            raise HTTPException(status_code=404, detail=f"no synopsis for scope {scope!r}")
        return synopsis.to_dict()

    @app.post("/sessions/{doc_id}/command")
    def command(doc_id: str, request: CommandRequest) -> dict:
        t_start = time.perf_counter()
        try:
            bundle = engine.get(doc_id)
        except MissingDocument as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        session = get_session(doc_id, request.session_id)

        base = engine.config.fusion
        overrides = {}
        if request.alpha is not None:
            overrides["alpha"] = request.alpha
        if request.tau is not None:
            overrides["abstain_threshold"] = request.tau
        if request.delta is not None:
            overrides["disambiguation_margin"] = request.delta
        if request.top_k is not None:
            overrides["top_k"] = request.top_k
        if overrides:
            try:
                fusion = FusionConfig(
                    alpha=overrides.get("alpha", base.alpha),
                    top_k=overrides.get("top_k", base.top_k),
                    abstain_threshold=overrides.get("abstain_threshold",
                                                    base.abstain_threshold),
                    disambiguation_margin=overrides.get("disambiguation_margin",
                                                        base.disambiguation_margin),
                )
            except ValueError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
        else:
            fusion = base

        with session.lock:
            t_route = time.perf_counter()
            intent = router.route(request.transcript, backoff,
                                  accept_threshold=config.backoff_accept_threshold)
            route_ms = (time.perf_counter() - t_route) * 1000.0

            session.pending = None
            is_jump = intent.kind == router.TEMPORAL and any(
                k in intent.slots for k in ("paragraph", "page", "section"))
            needs_confirm = is_jump or (config.confirm_all_intents
                                        and intent.kind != router.VIEWER_CONTROL)
            if needs_confirm and not request.confirm:
                session.pending = intent
                action = {"type": "await_confirm", "transcript": request.transcript,
                          "intent": intent.to_dict()}
                return _respond(request, session, intent, action, route_ms, 0.0,
                                t_start, flags=[])

            flags: list[str] = []
            t_retrieve = time.perf_counter()
            if intent.kind == router.VIEWER_CONTROL:
                action, retrieve_ms = _viewer_control(session, intent), 0.0
            else:
                context = NavContext(current_anchor=session.current_anchor,
                                     evidence=session.evidence,
                                     hit_cursor=session.hit_cursor)
                try:
                    result = engine.execute(doc_id, intent, context, fusion)
                except EvidenceEmpty as exc:
                    raise HTTPException(status_code=422, detail=str(exc))
                retrieve_ms = (time.perf_counter() - t_retrieve) * 1000.0
                if result.degraded:
                    flags.append("dense_unavailable")
                action = _apply(bundle, session, result)
            verify_grounding(bundle, action)
            response = _respond(request, session, intent, action, route_ms,
                                retrieve_ms, t_start, flags)
            audit.append({
                "ts": datetime.now(timezone.utc).isoformat(),
                "session_id": session.session_id,
                "doc_id": doc_id,
                "intent_kind": intent.kind,
                "slots": dict(intent.slots),
                "decision": action["type"],
                "anchor_ids": _anchor_ids_of(action),
            })
            return response

    def _viewer_control(session: Session, intent: Intent) -> dict:
        op = intent.slots.get("action")
        if op == "back":
            if not session.breadcrumb:
                return {"type": "abstain", "reason": "breadcrumb is empty"}
            anchor_id = session.breadcrumb.pop()
            # Restoring a position is not itself a jump: nothing is pushed.
            session.current_anchor = anchor_id
            return {"type": "scroll_to_anchor", "anchor_id": anchor_id,
                    "highlight_ids": [anchor_id]}
        return {"type": "ack", "op": str(op)}

    def _apply(bundle: DocumentBundle, session: Session, result: EngineResult) -> dict:
        """Fold an engine result into session state and build the wire action."""
        if result.kind == "scroll":
            previous = session.current_anchor
            if previous is not None and previous != result.anchor_id:
                session.breadcrumb.append(previous)
            session.current_anchor = result.anchor_id
            if result.candidates:
                session.evidence = tuple(result.candidates)
            if result.hit_cursor is not None:
                session.hit_cursor = result.hit_cursor
            elif result.candidates:
                session.hit_cursor = 0
            action = {"type": "scroll_to_anchor", "anchor_id": result.anchor_id,
                      "highlight_ids": list(result.highlight_ids)}
            if result.candidates:
                # Same list (and order) as the session evidence, so viewer
                # chips and server-side "open N" agree on indices.
                action["candidates"] = [candidate_payload(bundle, c)
                                        for c in result.candidates]
            return action
        if result.kind == "disambiguate":
            session.evidence = tuple(result.candidates)
            session.hit_cursor = -1
            return {"type": "show_disambiguation",
                    "highlight_ids": list(result.highlight_ids),
                    "candidates": [candidate_payload(bundle, c) for c in result.candidates]}
        if result.kind == "synopsis":
            assert result.synopsis is not None
            return {"type": "show_synopsis", "synopsis": result.synopsis.to_dict()}
        if result.kind == "ack":
            return {"type": "ack", "op": result.reason}
        return {"type": "abstain", "reason": result.reason or "no evidence"}

    def _anchor_ids_of(action: dict) -> list[str]:
        if action["type"] == "scroll_to_anchor":
            return list(dict.fromkeys([action["anchor_id"], *action["highlight_ids"]]))
        if action["type"] == "show_disambiguation":
            return [c["anchor_id"] for c in action["candidates"]]
        if action["type"] == "show_synopsis":
            ids: list[str] = []
            for line in action["synopsis"]["lines"]:
                for aid in line["anchor_ids"]:
                    if aid not in ids:
                        ids.append(aid)
            return ids
        return []

    def _respond(request: CommandRequest, session: Session, intent: Intent,
                 action: dict, route_ms: float, retrieve_ms: float,
                 t_start: float, flags: list[str]) -> dict:
        total_ms = (time.perf_counter() - t_start) * 1000.0
        body = {
            "session_id": session.session_id,
            "transcript_echo": request.transcript,
            "intent": intent.to_dict(),
            "action": action,
            "flags": flags,
            "latency_ms": {"route": route_ms, "retrieve": retrieve_ms,
                           "total": max(total_ms, route_ms + retrieve_ms)},
        }
        if intent.rewrites:
            body["rewrites"] = list(intent.rewrites)
        return body

    @app.get("/audit")
    def get_audit(session: str | None = Query(default=None)) -> Response:
        lines = "".join(json.dumps(r, separators=(",", ":")) + "\n"
                        for r in audit.records(session))
        return PlainTextResponse(lines, media_type="application/x-ndjson")

    return app
