"""Session-oriented HTTP service around the response pipeline.

The service owns a registry of conversation sessions and serializes message
handling per session, so concurrent posts to one session cannot interleave
their pipeline runs. Every successful message returns the chosen reply plus
the full response trace; failures return structured JSON errors.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from icebreaker.kg import related_entities
from icebreaker.pipeline import (
    ConversationSession,
    NoReplyError,
    Resources,
    ResponseTrace,
    respond,
)
from icebreaker.ranking import RankParams
from icebreaker.retrieval import RetrievalCaps


class ConfigError(ValueError):
    """Bad or missing service configuration."""


@dataclass(frozen=True)
class ServiceConfig:
    corpus_path: str | None = None
    kg_path: str | None = None
    patterns_path: str | None = None
    params: RankParams = RankParams()
    caps: RetrievalCaps = RetrievalCaps()
    host: str = "127.0.0.1"
    port: int = 8000
    auto_create_sessions: bool = False
    ui_dir: str | None = None

    def validate(self) -> "ServiceConfig":
        for label, value in (
            ("corpus", self.corpus_path),
            ("kg", self.kg_path),
            ("patterns", self.patterns_path),
        ):
            if value is not None and not Path(value).is_file():
                raise ConfigError(f"{label} file not found: {value}")
        if not 0 < self.port < 65536:
            raise ConfigError(f"port out of range: {self.port}")
        if self.ui_dir is not None and not Path(self.ui_dir).is_dir():
            raise ConfigError(f"ui directory not found: {self.ui_dir}")
        return self


@dataclass
class _SessionSlot:
    session: ConversationSession
    lock: threading.Lock = field(default_factory=threading.Lock)
    last_trace: ResponseTrace | None = None


class SessionRegistry:
    """Thread-safe store of live sessions with monotonically increasing ids."""

    def __init__(self):
        self._slots: dict[str, _SessionSlot] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self) -> str:
        with self._lock:
            self._counter += 1
            sid = f"s{self._counter}"
            self._slots[sid] = _SessionSlot(ConversationSession(sid))
            return sid

    def get(self, sid: str) -> _SessionSlot | None:
        with self._lock:
            return self._slots.get(sid)

    def get_or_create(self, sid: str) -> _SessionSlot:
        with self._lock:
            if sid not in self._slots:
                self._slots[sid] = _SessionSlot(ConversationSession(sid))
            return self._slots[sid]

    def delete(self, sid: str) -> bool:
        with self._lock:
            return self._slots.pop(sid, None) is not None


class MessageIn(BaseModel):
    text: str


def create_app(
    resources: Resources | None = None, config: ServiceConfig | None = None
) -> FastAPI:
    config = (config or ServiceConfig()).validate()
    if resources is None:
        resources = Resources.load(
            config.corpus_path,
            config.kg_path,
            config.patterns_path,
            params=config.params,
            caps=config.caps,
        )
    registry = SessionRegistry()
    app = FastAPI(title="icebreaker", docs_url=None, redoc_url=None)

    def slot_or_404(sid: str) -> _SessionSlot:
        slot = (
            registry.get_or_create(sid)
            if config.auto_create_sessions
            else registry.get(sid)
        )
        if slot is None:
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return slot

    @app.get("/health")
    def health():
        return {"status": "ok", "corpus_pairs": len(resources.index.pairs)}

    @app.post("/sessions", status_code=201)
    def create_session():
        return {"session_id": registry.create()}

    @app.delete("/sessions/{sid}")
    def delete_session(sid: str):
        if not registry.delete(sid):
            raise HTTPException(status_code=404, detail=f"unknown session {sid!r}")
        return {"deleted": sid}

    @app.get("/sessions/{sid}")
    def transcript(sid: str):
        slot = slot_or_404(sid)
        with slot.lock:
            return {
                "session_id": sid,
                "turns": [
                    {"speaker": u.speaker, "text": u.text, "turn": u.turn}
                    for u in slot.session.utterances
                ],
            }

    @app.get("/sessions/{sid}/trace")
    def last_trace(sid: str):
        slot = slot_or_404(sid)
        with slot.lock:
            if slot.last_trace is None:
                raise HTTPException(
                    status_code=404, detail=f"session {sid!r} has no trace yet"
                )
            return {"session_id": sid, "trace": slot.last_trace.to_dict(resources.index)}

    @app.post("/sessions/{sid}/messages")
    def post_message(sid: str, message: MessageIn):
        if not message.text.strip():
            raise HTTPException(status_code=422, detail="message text is empty")
        slot = slot_or_404(sid)
        # One pipeline run at a time per session keeps turn order coherent.
        with slot.lock:
            try:
                reply, trace = respond(slot.session, message.text, resources)
            except NoReplyError as exc:
                slot.last_trace = exc.trace
                return JSONResponse(
                    status_code=422,
                    content={
                        "error": "no_reply",
                        "detail": str(exc),
                        "trace": exc.trace.to_dict(resources.index),
                    },
                )
            slot.last_trace = trace
            return {
                "session_id": sid,
                "reply": reply,
                "trace": trace.to_dict(resources.index),
            }

    @app.get("/kg/neighbors")
    def kg_neighbors(entity: str, k: int = 5):
        return {
            "entity": entity,
            "known": entity in resources.graph.vocabulary,
            "neighbors": [
                {"entity": e, "weight": w}
                for e, w in related_entities(resources.graph, entity, k)
            ],
        }

    if config.ui_dir is not None:
        app.mount("/", StaticFiles(directory=config.ui_dir, html=True), name="ui")

    return app


def load_config_file(path: str | Path) -> dict:
    """Read a JSON config file; unknown keys are rejected to catch typos."""
    allowed = {
        "corpus", "kg", "patterns", "mu", "alpha_x", "alpha_y", "tol",
        "host", "port", "auto_create_sessions", "ui_dir",
        "per_entity", "total", "min_len",
    }
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return raw
