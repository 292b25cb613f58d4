"""HTTP surface over the timeline service.

Error mapping: 400 precondition failures, 404 unknown referents,
422 unparseable model output, 429 budget, 502 upstream errors,
504 timeouts. Built web assets, when present, are served at ``/`` so a
single process runs the whole system; the API works without them.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from gentl import store
from gentl.errors import (
    BudgetExceeded,
    GenTLError,
    InvalidParams,
    IoError,
    MalformedResponse,
    SchemaError,
    Timeout,
    UnknownNode,
    UnknownRecord,
    UnknownSession,
    UpstreamError,
)
from gentl.service import TimelineService

_STATUS_BY_ERROR: list[tuple[type[GenTLError], int]] = [
    (InvalidParams, 400),  # covers TooFewEvents / EmptyTimeline subclasses
    (UnknownSession, 404),
    (UnknownNode, 404),
    (UnknownRecord, 404),
    (MalformedResponse, 422),
    (BudgetExceeded, 429),
    (UpstreamError, 502),
    (Timeout, 504),
    (SchemaError, 422),
    (IoError, 500),
]

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>gentl</title></head>
<body><h1>gentl service</h1>
<p>The API is running. No web client build was found; see README for
building the frontend, or use the HTTP API directly.</p>
</body></html>"""


class EventsBody(BaseModel):
    topic: str = ""
    context: str = ""
    source_node: str | None = None
    num_of_topics: int | None = None
    num_of_margin: int | None = None


class ExplainBody(BaseModel):
    topic: str = ""
    context: str = ""
    node: str | None = None


class QuestionsBody(BaseModel):
    topic: str
    context: str = ""


class RelationshipBody(BaseModel):
    node_ids: list[str]


class NodePatch(BaseModel):
    x: float
    y: float


class FocusBody(BaseModel):
    record_id: str | None = None
    event_id: str | None = None
    event_type: str | None = None


class SaveBody(BaseModel):
    path: str | None = None


def _status_for(exc: GenTLError) -> int:
    for error_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, error_type):
            return status
    return 500


def create_app(service: TimelineService, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="gentl", docs_url=None, redoc_url=None)

    @app.exception_handler(GenTLError)
    async def handle_domain_error(request: Request, exc: GenTLError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session() -> dict:
        return {"session_id": service.create_session()}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        return service.session_doc(session_id)

    @app.post("/sessions/{session_id}/events")
    def generate_events(session_id: str, body: EventsBody) -> dict:
        outcome = service.generate_events(
            session_id,
            topic=body.topic,
            context=body.context,
            source_node=body.source_node,
            num_of_topics=body.num_of_topics,
            num_of_margin=body.num_of_margin,
        )
        doc = service.session_doc(session_id)
        return {
            "events": [doc["events"][e.id] for e in outcome.events],
            "edges": [
                {
                    "id": e.id,
                    "kind": e.kind.value,
                    "from_node": e.from_node,
                    "to_node": e.to_node,
                    "record": e.record,
                }
                for e in outcome.edges
            ],
            "record": store.record_doc(outcome.record) if outcome.record else None,
            "warnings": outcome.warnings,
        }

    @app.post("/sessions/{session_id}/explain")
    def explain(session_id: str, body: ExplainBody) -> dict:
        record, warnings = service.explain(
            session_id, topic=body.topic, context=body.context, node=body.node
        )
        return {"record": store.record_doc(record), "warnings": warnings}

    @app.post("/sessions/{session_id}/questions")
    def questions(session_id: str, body: QuestionsBody) -> dict:
        items, record = service.questions(session_id, body.topic, body.context)
        return {"questions": items, "record": store.record_doc(record)}

    @app.post("/sessions/{session_id}/relationship")
    def relationship(session_id: str, body: RelationshipBody) -> dict:
        record, edges = service.generate_relationship(session_id, body.node_ids)
        return {
            "record": store.record_doc(record),
            "edges": [
                {
                    "id": e.id,
                    "kind": e.kind.value,
                    "from_node": e.from_node,
                    "to_node": e.to_node,
                    "record": e.record,
                }
                for e in edges
            ],
        }

    @app.patch("/sessions/{session_id}/nodes/{node_id}")
    def move_node(session_id: str, node_id: str, body: NodePatch) -> dict:
        placement = service.move_node(session_id, node_id, body.x, body.y)
        return {
            "event_id": placement.event_id,
            "x": placement.x,
            "y": placement.y,
            "pinned": placement.pinned,
        }

    @app.delete("/sessions/{session_id}/nodes/{node_id}")
    def delete_node(session_id: str, node_id: str) -> dict:
        return service.delete_node(session_id, node_id)

    @app.get("/sessions/{session_id}/layout")
    def layout_snapshot(session_id: str, zoom: float = 1.0) -> dict:
        return service.layout_snapshot(session_id, zoom)

    @app.post("/sessions/{session_id}/focus")
    def focus(session_id: str, body: FocusBody) -> dict:
        given = [
            value
            for value in (body.record_id, body.event_id, body.event_type)
            if value is not None
        ]
        if len(given) != 1:
            raise InvalidParams(
                "provide exactly one of record_id, event_id, event_type"
            )
        if body.record_id is not None:
            return service.focus_record(session_id, body.record_id)
        if body.event_id is not None:
            return service.focus_event(session_id, body.event_id)
        return service.filter_type(session_id, body.event_type)

    @app.get("/sessions/{session_id}/records")
    def records(session_id: str) -> dict:
        return {"records": service.session_doc(session_id)["records"]}

    @app.post("/sessions/{session_id}/save")
    def save(session_id: str, body: SaveBody | None = None) -> dict:
        path = service.save(session_id, body.path if body else None)
        return {"path": str(path)}

    @app.get("/sessions/{session_id}/export", response_class=PlainTextResponse)
    def export(session_id: str, fmt: str = "outline") -> str:
        return service.export(session_id, fmt)

    static = Path(static_dir) if static_dir else None
    if static is not None and static.is_dir():
        app.mount("/", StaticFiles(directory=static, html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index() -> str:
            return _PLACEHOLDER_PAGE

    return app
