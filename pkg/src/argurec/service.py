"""HTTP/JSON facade: sessions, recommendations, explanation dialog, events.

State is file-backed and replayable: sessions are appended as full JSONL
snapshots (last one wins on reload) and events go to an append-only JSONL
log. Dialog state lives server-side so the interactivity gating cannot be
bypassed; it is also derivable by folding the logged moves, which the
replay helper and the crash-restart tests rely on.
"""

from __future__ import annotations

import enum
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response

from . import analytics, personalize
from .corpus import FeatureCategory, SentenceRecord
from .efm import EfmModel, ModelNotTrained
from .explain import (
    DialogLevel,
    DialogState,
    ExplanationEngine,
    Interactivity,
    Move,
    MoveKind,
    MoveNotAllowed,
    NoSuchTerm,
    PresentationStyle,
    UnknownFeature,
    UnknownItem,
    allowed_moves,
    apply_move,
)
from .personalize import Session, StatedPreferences


class EventKind(str, enum.Enum):
    VIEW_LIST = "view_list"
    MORE_WHY = "more_why"
    MORE_FEATURES = "more_features"
    WHAT_REPORTED = "what_reported"
    FINE_GRAINED = "fine_grained"
    BACK = "back"
    CHOOSE_HOTEL = "choose_hotel"


# kinds that advance the dialog; recorded only by the explanation endpoint
MOVE_EVENT_KINDS = {
    EventKind.MORE_WHY,
    EventKind.MORE_FEATURES,
    EventKind.WHAT_REPORTED,
    EventKind.FINE_GRAINED,
    EventKind.BACK,
}

_REQUIRED_EVENT_FIELDS = {
    EventKind.VIEW_LIST: (),
    EventKind.MORE_WHY: ("item_id",),
    EventKind.MORE_FEATURES: ("item_id",),
    EventKind.WHAT_REPORTED: ("item_id", "feature"),
    EventKind.FINE_GRAINED: ("item_id", "feature", "term"),
    EventKind.BACK: (),
    EventKind.CHOOSE_HOTEL: ("item_id",),
}


class UnknownSession(Exception):
    pass


class ValidationError(Exception):
    pass


class StorageError(Exception):
    pass


@dataclass(frozen=True)
class Event:
    session_id: str
    kind: str
    timestamp: int
    item_id: Optional[str] = None
    feature: Optional[str] = None
    term: Optional[str] = None

    def __post_init__(self):
        try:
            kind = EventKind(self.kind)
        except ValueError:
            raise ValidationError(f"unknown event kind {self.kind!r}") from None
        for field_name in _REQUIRED_EVENT_FIELDS[kind]:
            if not getattr(self, field_name):
                raise ValidationError(f"event kind {kind.value} requires {field_name}")

    def to_json(self) -> dict:
        obj = {"session_id": self.session_id, "kind": self.kind, "timestamp": self.timestamp}
        for key in ("item_id", "feature", "term"):
            value = getattr(self, key)
            if value is not None:
                obj[key] = value
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "Event":
        return cls(
            session_id=obj["session_id"],
            kind=obj["kind"],
            timestamp=int(obj["timestamp"]),
            item_id=obj.get("item_id"),
            feature=obj.get("feature"),
            term=obj.get("term"),
        )


class EventLog:
    """Append-only JSONL event log; appends are durable before returning.

    Per-session timestamps are kept non-decreasing by clamping; arrival
    order is preserved for equal timestamps.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._events: list[Event] = []
        self._last_ts: dict[str, int] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        event = Event.from_json(json.loads(line))
                        self._events.append(event)
                        self._last_ts[event.session_id] = event.timestamp

    def append(self, event: Event) -> Event:
        with self._lock:
            floor = self._last_ts.get(event.session_id)
            if floor is not None and event.timestamp < floor:
                event = Event(
                    session_id=event.session_id,
                    kind=event.kind,
                    timestamp=floor,
                    item_id=event.item_id,
                    feature=event.feature,
                    term=event.term,
                )
            try:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(event.to_json(), sort_keys=True) + "\n")
                    f.flush()
                    os.fsync(f.fileno())
            except OSError as e:
                raise StorageError(str(e)) from e
            self._events.append(event)
            self._last_ts[event.session_id] = event.timestamp
            return event

    def events(self) -> list[Event]:
        with self._lock:
            return list(self._events)

    def __len__(self) -> int:
        return len(self._events)


class SessionStore:
    """Session snapshots as append-only JSONL; the last snapshot per session
    id is the current state."""

    _ID_RE = re.compile(r"^s(\d+)$")

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as f:
                for line in f:
                    if line.strip():
                        session = Session.from_json(json.loads(line))
                        self._sessions[session.session_id] = session

    def next_session_id(self) -> str:
        with self._lock:
            highest = 0
            for sid in self._sessions:
                match = self._ID_RE.match(sid)
                if match:
                    highest = max(highest, int(match.group(1)))
            return f"s{highest + 1:06d}"

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def persist(self, session: Session) -> None:
        with self._lock:
            try:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(session.to_json(), sort_keys=True) + "\n")
                    f.flush()
                    os.fsync(f.fileno())
            except OSError as e:
                raise StorageError(str(e)) from e
            self._sessions[session.session_id] = session

    def sessions(self) -> list[Session]:
        with self._lock:
            return sorted(self._sessions.values(), key=lambda s: s.session_id)


def replay_dialog_states(sessions: Sequence[Session], events: Sequence[Event]) -> dict[str, DialogState]:
    """Fold the logged moves to reconstruct each session's dialog state."""
    states = {s.session_id: DialogState() for s in sessions}
    interactivity = {s.session_id: s.interactivity for s in sessions}
    for event in events:
        kind = EventKind(event.kind)
        if kind not in MOVE_EVENT_KINDS or event.session_id not in states:
            continue
        move = Move(
            kind=MoveKind(kind.value),
            item_id=event.item_id,
            feature=FeatureCategory.from_id(event.feature) if event.feature else None,
            term=event.term,
        )
        states[event.session_id] = apply_move(
            states[event.session_id], move, interactivity[event.session_id]
        )
    return states


_CONDITIONS = [
    (interactivity, style)
    for interactivity in (Interactivity.LOW, Interactivity.HIGH)
    for style in (PresentationStyle.TEXT, PresentationStyle.TABLE, PresentationStyle.BAR_CHART)
]


class ApiError(Exception):
    def __init__(self, status: int, code: str, detail: str):
        super().__init__(detail)
        self.status = status
        self.code = code
        self.detail = detail


def _now_ms() -> int:
    return int(time.time() * 1000)


def _parse_preferences(raw) -> StatedPreferences:
    if not isinstance(raw, list):
        raise ValidationError("preferences must be a list of 5 feature ids")
    try:
        return StatedPreferences.from_ids(raw)
    except ValueError as e:
        raise ValidationError(str(e)) from None


def create_app(
    model: Optional[EfmModel],
    records: Sequence[SentenceRecord],
    storage_dir: str | Path,
    condition_seed: int = 0,
    default_limit: int = personalize.DEFAULT_RECOMMENDATION_LIMIT,
) -> FastAPI:
    """Wire the API around a trained model, sentence records and a storage
    directory (sessions.jsonl + events.jsonl are created inside it)."""
    storage = Path(storage_dir)
    storage.mkdir(parents=True, exist_ok=True)
    engine = ExplanationEngine(model, records)
    store = SessionStore(storage / "sessions.jsonl")
    log = EventLog(storage / "events.jsonl")
    session_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    app = FastAPI(title="argurec service")
    app.state.engine = engine
    app.state.store = store
    app.state.event_log = log

    def session_lock(session_id: str) -> threading.Lock:
        with locks_guard:
            return session_locks.setdefault(session_id, threading.Lock())

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status, content={"error": exc.code, "detail": exc.detail}
        )

    @app.exception_handler(RequestValidationError)
    async def handle_request_validation(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400, content={"error": "validation_error", "detail": str(exc)}
        )

    def fail(exc: Exception) -> ApiError:
        if isinstance(exc, MoveNotAllowed):
            return ApiError(403, "move_not_allowed", str(exc))
        if isinstance(exc, UnknownSession):
            return ApiError(404, "unknown_session", f"unknown session {exc}")
        if isinstance(exc, ModelNotTrained):
            return ApiError(503, "model_not_trained", str(exc))
        if isinstance(exc, StorageError):
            return ApiError(500, "storage_error", str(exc))
        if isinstance(exc, (ValidationError, UnknownItem, UnknownFeature, NoSuchTerm, ValueError)):
            return ApiError(400, "validation_error", str(exc))
        raise exc

    async def read_json(request: Request) -> dict:
        try:
            body = await request.json()
        except Exception:
            raise ApiError(400, "validation_error", "request body must be JSON")
        if not isinstance(body, dict):
            raise ApiError(400, "validation_error", "request body must be a JSON object")
        return body

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await read_json(request)
        try:
            prefs = _parse_preferences(body.get("preferences"))
            try:
                interactivity = Interactivity(body.get("interactivity"))
                style = PresentationStyle(body.get("style"))
            except ValueError:
                raise ValidationError(
                    "interactivity must be low|high and style text|table|bar_chart"
                ) from None
            proxy = personalize.select_proxy(model, prefs)
        except Exception as e:
            raise fail(e)
        session = Session(
            session_id=store.next_session_id(),
            prefs=prefs,
            proxy_user_index=proxy,
            interactivity=interactivity,
            style=style,
        )
        try:
            store.persist(session)
        except StorageError as e:
            raise ApiError(500, "storage_error", str(e))
        return JSONResponse(
            status_code=201,
            content={
                "session_id": session.session_id,
                "proxy_user_id": model.user_ids.id(proxy),
            },
        )

    @app.get("/sessions/{session_id}/recommendations")
    async def recommendations(session_id: str, limit: Optional[int] = None):
        try:
            session = store.get(session_id)
            ranked = personalize.recommend(
                model, session, default_limit if limit is None else limit
            )
        except Exception as e:
            raise fail(e)
        return {
            "items": [
                {"item_id": item_id, "predicted_rating": value, "circles": circles}
                for item_id, value, circles in ranked
            ]
        }

    def build_view(session: Session) -> dict:
        state = session.dialog
        if state.level is DialogLevel.L1_LIST:
            return {
                "level": state.level.value,
                "available_moves": [
                    k.value for k in MoveKind
                    if k in allowed_moves(state, session.interactivity)
                ],
            }
        if state.level is DialogLevel.L2_OVERVIEW:
            payload = engine.overview_explanation(session, state.item_id)
        elif state.level is DialogLevel.L3_FEATURE_REPORT:
            payload = engine.feature_report(session, state.item_id, state.feature)
        else:
            payload = engine.fine_grained_report(
                session, state.item_id, state.feature, state.term
            )
        return payload.to_json()

    @app.post("/sessions/{session_id}/explanation")
    async def explanation(session_id: str, request: Request):
        body = await read_json(request)
        try:
            session = store.get(session_id)
        except UnknownSession as e:
            raise fail(e)
        with session_lock(session_id):
            try:
                try:
                    kind = MoveKind(body.get("move"))
                except ValueError:
                    raise ValidationError(f"unknown move {body.get('move')!r}") from None
                feature = None
                if body.get("feature") is not None:
                    try:
                        feature = FeatureCategory.from_id(body["feature"])
                    except ValueError as e:
                        raise ValidationError(str(e)) from None
                move = Move(
                    kind=kind,
                    item_id=body.get("item_id"),
                    feature=feature,
                    term=body.get("term"),
                )
                before = session.dialog
                session.dialog = apply_move(before, move, session.interactivity)
                try:
                    view = build_view(session)
                except Exception:
                    session.dialog = before
                    raise
                # context comes from the successor state, so replaying the
                # event reconstructs exactly this transition
                after = session.dialog
                event = Event(
                    session_id=session_id,
                    kind=kind.value,
                    timestamp=_now_ms(),
                    item_id=after.item_id or before.item_id,
                    feature=after.feature.id if after.feature is not None else None,
                    term=after.term,
                )
                try:
                    log.append(event)
                except Exception:
                    session.dialog = before
                    raise
                # if only the snapshot write fails the event is already
                # durable, and replaying the log reconstructs this state
                store.persist(session)
            except Exception as e:
                raise fail(e)
        return view

    @app.post("/sessions/{session_id}/events", status_code=204)
    async def post_event(session_id: str, request: Request):
        body = await read_json(request)
        try:
            session = store.get(session_id)
            try:
                kind = EventKind(body.get("kind"))
            except ValueError:
                raise ValidationError(f"unknown event kind {body.get('kind')!r}") from None
            if kind in MOVE_EVENT_KINDS:
                raise ValidationError(
                    "dialog moves are recorded by the explanation endpoint"
                )
            timestamp = body.get("timestamp", _now_ms())
            if not isinstance(timestamp, int):
                raise ValidationError("timestamp must be integer milliseconds")
            event = Event(
                session_id=session.session_id,
                kind=kind.value,
                timestamp=timestamp,
                item_id=body.get("item_id"),
                feature=body.get("feature"),
                term=body.get("term"),
            )
            log.append(event)
        except Exception as e:
            raise fail(e)
        return Response(status_code=204)

    @app.get("/admin/usage")
    async def usage():
        stats = analytics.usage_stats(log.events(), store.sessions())
        return stats.to_json()

    @app.get("/admin/next-condition")
    async def next_condition():
        interactivity, style = _CONDITIONS[
            (condition_seed + len(store.sessions())) % len(_CONDITIONS)
        ]
        return {"interactivity": interactivity.value, "style": style.value}

    return app
