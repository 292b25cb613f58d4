"""Session persistence and export.

One self-contained JSON document per session, schema_version 1, atomic
replace on save. Field names mirror the domain types in lower_snake_case.
Unknown fields from future schema versions are ignored with a warning;
documents that violate model invariants are rejected on load.
"""

from __future__ import annotations

import json
import logging
import os
import tempfile
from datetime import datetime
from pathlib import Path

from gentl.errors import IoError, SchemaError
from gentl.layout import format_year_label
from gentl.model import (
    CanvasState,
    Citation,
    EdgeKind,
    Edge,
    EventType,
    EventsPayload,
    ExplainPayload,
    GenerationRecord,
    ImagePayload,
    NodePlacement,
    Payload,
    QuestionsPayload,
    RecordKind,
    RelationshipPayload,
    RelationshipText,
    Span,
    TimelineEvent,
    TimelineScale,
    validate_session,
)

logger = logging.getLogger("gentl.store")

SCHEMA_VERSION = 1

_TOP_LEVEL_KEYS = {
    "schema_version",
    "session_id",
    "events",
    "placements",
    "edges",
    "scale",
    "records",
    "selection",
}


# --- serialization -----------------------------------------------------


def _citation_doc(c: Citation) -> dict:
    return {
        "title": c.title,
        "url": c.url,
        "anchor": list(c.anchor) if c.anchor is not None else None,
    }


def _payload_doc(parsed: Payload) -> dict:
    if isinstance(parsed, EventsPayload):
        return {"event_ids": list(parsed.event_ids)}
    if isinstance(parsed, ExplainPayload):
        return {"text": parsed.text, "node_id": parsed.node_id}
    if isinstance(parsed, QuestionsPayload):
        return {"questions": list(parsed.questions)}
    if isinstance(parsed, RelationshipPayload):
        return {
            "text": {
                "plain_text": parsed.text.plain_text,
                "spans": [
                    {
                        "start": s.start,
                        "end": s.end,
                        "display": s.display,
                        "name": s.name,
                        "event_id": s.event_id,
                    }
                    for s in parsed.text.spans
                ],
            },
            "event_ids": list(parsed.event_ids),
            "events_raw": parsed.events_raw,
            "note": parsed.note,
        }
    if isinstance(parsed, ImagePayload):
        return {"locator": parsed.locator}
    raise SchemaError(f"unserializable payload {type(parsed).__name__}")


def record_doc(record: GenerationRecord) -> dict:
    return {
        "id": record.id,
        "kind": record.kind.value,
        "topic": record.topic,
        "context": record.context,
        "subevents": record.subevents,
        "raw_output": record.raw_output,
        "parsed": _payload_doc(record.parsed),
        "citations": [_citation_doc(c) for c in record.citations],
        "title": record.title,
        "created_at": record.created_at.isoformat(),
        "latency_ms": record.latency_ms,
    }


def serialize_session(state: CanvasState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "session_id": state.session_id,
        "events": {
            event_id: {
                "id": e.id,
                "name": e.name,
                "year": e.year,
                "event_type": e.event_type.value,
                "short_summary": e.short_summary,
                "explanation": e.explanation,
                "origin": e.origin,
            }
            for event_id, e in state.events.items()
        },
        "placements": {
            event_id: {
                "event_id": p.event_id,
                "x": p.x,
                "y": p.y,
                "pinned": p.pinned,
            }
            for event_id, p in state.placements.items()
        },
        "edges": [
            {
                "id": e.id,
                "kind": e.kind.value,
                "from_node": e.from_node,
                "to_node": e.to_node,
                "record": e.record,
            }
            for e in state.edges
        ],
        "scale": (
            {
                "min_year": state.scale.min_year,
                "max_year": state.scale.max_year,
                "pixels_per_year": state.scale.pixels_per_year,
                "zoom": state.scale.zoom,
            }
            if state.scale is not None
            else None
        ),
        "records": [record_doc(r) for r in state.records],
        "selection": sorted(state.selection),
    }


# --- deserialization ---------------------------------------------------


def _take(doc: dict, known: set[str], where: str, warnings: list[str]) -> None:
    unknown = set(doc) - known
    if unknown:
        warnings.append(f"{where}: ignoring unknown fields {sorted(unknown)}")


def _parse_payload(kind: RecordKind, doc: dict) -> Payload:
    if kind is RecordKind.EVENTS:
        return EventsPayload(event_ids=list(doc.get("event_ids", [])))
    if kind is RecordKind.EXPLAIN:
        return ExplainPayload(text=doc.get("text", ""), node_id=doc.get("node_id"))
    if kind is RecordKind.QUESTIONS:
        return QuestionsPayload(questions=list(doc.get("questions", [])))
    if kind is RecordKind.RELATIONSHIP:
        text_doc = doc.get("text", {})
        return RelationshipPayload(
            text=RelationshipText(
                plain_text=text_doc.get("plain_text", ""),
                spans=[
                    Span(
                        start=s["start"],
                        end=s["end"],
                        display=s["display"],
                        name=s["name"],
                        event_id=s.get("event_id"),
                    )
                    for s in text_doc.get("spans", [])
                ],
            ),
            event_ids=list(doc.get("event_ids", [])),
            events_raw=doc.get("events_raw"),
            note=doc.get("note"),
        )
    if kind is RecordKind.IMAGE:
        return ImagePayload(locator=doc.get("locator", ""))
    raise SchemaError(f"unknown record kind {kind}")


def parse_record(doc: dict) -> GenerationRecord:
    try:
        kind = RecordKind(doc["kind"])
        return GenerationRecord(
            id=doc["id"],
            kind=kind,
            topic=doc.get("topic", ""),
            context=doc.get("context", ""),
            subevents=doc.get("subevents"),
            raw_output=doc.get("raw_output", ""),
            parsed=_parse_payload(kind, doc.get("parsed", {})),
            citations=[
                Citation(
                    title=c["title"],
                    url=c["url"],
                    anchor=tuple(c["anchor"]) if c.get("anchor") else None,
                )
                for c in doc.get("citations", [])
            ],
            title=doc["title"],
            created_at=datetime.fromisoformat(doc["created_at"]),
            latency_ms=int(doc.get("latency_ms", 0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad record document: {exc}") from exc


def deserialize_session(doc: dict) -> CanvasState:
    warnings: list[str] = []
    if not isinstance(doc, dict):
        raise SchemaError("session document must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported version {version!r}")
    _take(doc, _TOP_LEVEL_KEYS, "session", warnings)
    try:
        state = CanvasState(
            session_id=doc["session_id"],
            events={
                event_id: TimelineEvent(
                    id=e["id"],
                    name=e["name"],
                    year=int(e["year"]),
                    event_type=EventType(e["event_type"]),
                    short_summary=e.get("short_summary"),
                    explanation=e.get("explanation"),
                    origin=e.get("origin"),
                )
                for event_id, e in doc.get("events", {}).items()
            },
            placements={
                event_id: NodePlacement(
                    event_id=p["event_id"],
                    x=float(p["x"]),
                    y=float(p["y"]),
                    pinned=bool(p.get("pinned", False)),
                )
                for event_id, p in doc.get("placements", {}).items()
            },
            edges=[
                Edge(
                    id=e["id"],
                    kind=EdgeKind(e["kind"]),
                    from_node=e["from_node"],
                    to_node=e["to_node"],
                    record=e["record"],
                )
                for e in doc.get("edges", [])
            ],
            scale=(
                TimelineScale(
                    min_year=int(doc["scale"]["min_year"]),
                    max_year=int(doc["scale"]["max_year"]),
                    pixels_per_year=float(doc["scale"]["pixels_per_year"]),
                    zoom=float(doc["scale"].get("zoom", 1.0)),
                )
                if doc.get("scale") is not None
                else None
            ),
            records=[parse_record(r) for r in doc.get("records", [])],
            selection=set(doc.get("selection", [])),
        )
    except SchemaError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad session document: {exc}") from exc

    for warning in warnings:
        logger.warning(warning)
    violations = validate_session(state)
    if violations:
        raise SchemaError("session violates invariants: " + "; ".join(violations))
    return state


# --- file I/O ----------------------------------------------------------


def save_session(state: CanvasState, path: str | Path) -> None:
    """Write the session document atomically (temp file + rename)."""
    target = Path(path)
    doc = serialize_session(state)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(
            dir=target.parent, prefix=f".{target.name}.", suffix=".tmp"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(doc, handle, ensure_ascii=False, indent=2)
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as exc:
        raise IoError(f"cannot write session to {target}: {exc}") from exc


def load_session(path: str | Path) -> CanvasState:
    source = Path(path)
    try:
        raw = source.read_text("utf-8")
    except OSError as exc:
        raise IoError(f"cannot read session from {source}: {exc}") from exc
    try:
        doc = json.loads(raw)
    except ValueError as exc:
        raise SchemaError(f"not a JSON document: {exc}") from exc
    return deserialize_session(doc)


def structurally_equal(a: CanvasState, b: CanvasState) -> bool:
    """Structural equality ignoring sub-second timestamp precision."""

    def normalize(doc: dict) -> dict:
        for record in doc["records"]:
            record["created_at"] = record["created_at"].split(".")[0]
        return doc

    return normalize(serialize_session(a)) == normalize(serialize_session(b))


# --- export ------------------------------------------------------------


def export_timeline(state: CanvasState, fmt: str = "outline") -> str:
    """Chronological text outline of the session.

    ``outline`` lists events plus relationship-history titles; ``document``
    also includes per-event summaries and description-history titles.
    """
    if fmt not in ("outline", "document"):
        raise SchemaError(f"unknown export format {fmt!r}")
    lines = [f"Timeline — session {state.session_id}", ""]
    ordered = sorted(state.events.values(), key=lambda e: (e.year, e.name))
    for event in ordered:
        lines.append(
            f"{format_year_label(event.year)} — {event.name} [{event.event_type.value}]"
        )
        if fmt == "document" and event.short_summary:
            lines.append(f"    {event.short_summary}")
    relationship_titles = [
        r.title for r in state.records if r.kind is RecordKind.RELATIONSHIP
    ]
    if relationship_titles:
        lines.append("")
        lines.append("Relationships:")
        lines.extend(f"- {title}" for title in relationship_titles)
    if fmt == "document":
        description_titles = [
            r.title
            for r in state.records
            if r.kind in (RecordKind.EXPLAIN, RecordKind.QUESTIONS)
        ]
        if description_titles:
            lines.append("")
            lines.append("Descriptions:")
            lines.extend(f"- {title}" for title in description_titles)
    return "\n".join(lines) + "\n"
