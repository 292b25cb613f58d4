"""Shared domain types for the generative timeline.

Pure value types plus ``validate_session``, the single referee for every
structural invariant. No I/O here; persistence lives in ``store`` and all
mutation is orchestrated by the service layer, which calls the small
cascade helpers on :class:`CanvasState` so referential integrity survives
any add/move/delete sequence.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

YEAR_BOUND = 100_000
MAX_NAME_LEN = 200
MAX_EXPLANATION_LEN = 3000


def new_id() -> str:
    return uuid.uuid4().hex[:12]


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


class EventType(str, Enum):
    """Closed set of event categories shown in the legend."""

    THEORY = "Theory"
    DISCOVERY = "Discovery"
    INVENTION = "Invention"
    POLITICS = "Politics"
    ART = "Art"
    ECONOMICS = "Economics"
    OTHER = "Other"

    @classmethod
    def from_label(cls, label: str) -> tuple[EventType, bool]:
        """Map a free-form label to a type.

        Returns ``(type, recognized)``; unrecognized labels degrade to
        ``OTHER`` with ``recognized=False`` so one bad label never discards
        the rest of a response.
        """
        cleaned = label.strip()
        for member in cls:
            if member.value.lower() == cleaned.lower():
                return member, True
        return cls.OTHER, False


class EdgeKind(str, Enum):
    PROVENANCE = "Provenance"
    RELATIONSHIP = "Relationship"


class RecordKind(str, Enum):
    EVENTS = "Events"
    EXPLAIN = "Explain"
    QUESTIONS = "Questions"
    RELATIONSHIP = "Relationship"
    IMAGE = "Image"


@dataclass
class TimelineEvent:
    """One historical event node.

    ``origin`` holds the id of the generation record that produced the
    event, or ``None`` for user-placed nodes. Years are plain signed
    integers; negative means BC.
    """

    id: str
    name: str
    year: int
    event_type: EventType
    short_summary: str | None = None
    explanation: str | None = None
    origin: str | None = None


@dataclass
class NodePlacement:
    """Canvas position of an event node.

    Unpinned nodes track ``year_to_x`` of the current scale; a manual drag
    sets ``pinned=True`` and exempts the node from re-layout.
    """

    event_id: str
    x: float
    y: float
    pinned: bool = False


@dataclass
class Edge:
    id: str
    kind: EdgeKind
    from_node: str
    to_node: str
    record: str


@dataclass
class TimelineScale:
    """Linear year-to-pixel mapping covering every event in the session."""

    min_year: int
    max_year: int
    pixels_per_year: float
    zoom: float = 1.0


@dataclass
class Citation:
    """Source attribution; ``anchor`` is a character range into the
    record's display prose."""

    title: str
    url: str
    anchor: tuple[int, int] | None = None


@dataclass
class Span:
    """One resolved event reference inside relationship prose.

    ``[start, end)`` covers ``display`` inside the plain text; ``name`` is
    the referenced event name exactly as it appeared in the markup and
    ``event_id`` is ``None`` when unresolved.
    """

    start: int
    end: int
    display: str
    name: str
    event_id: str | None = None


@dataclass
class RelationshipText:
    plain_text: str
    spans: list[Span] = field(default_factory=list)

    def to_markup(self) -> str:
        """Reinsert reference markers; inverse of the markup parser for
        marker-balanced inputs."""
        out: list[str] = []
        pos = 0
        for span in self.spans:
            out.append(self.plain_text[pos:span.start])
            out.append(f"={self.plain_text[span.start:span.end]}@{span.name}=")
            pos = span.end
        out.append(self.plain_text[pos:])
        return "".join(out)


# Kind-specific parsed payloads. validate_session checks the pairing.


@dataclass
class EventsPayload:
    event_ids: list[str] = field(default_factory=list)


@dataclass
class ExplainPayload:
    text: str
    node_id: str | None = None


@dataclass
class QuestionsPayload:
    questions: list[str] = field(default_factory=list)


@dataclass
class RelationshipPayload:
    """Relationship prose plus the events it was generated over.

    Event generation folds its whole flow into one of these: ``event_ids``
    are the nodes it added, ``events_raw`` keeps the raw event-list model
    output for auditing, and ``note`` carries an error marker when the
    follow-up relationship completion failed (events are kept regardless).
    """

    text: RelationshipText
    event_ids: list[str] = field(default_factory=list)
    events_raw: str | None = None
    note: str | None = None


@dataclass
class ImagePayload:
    locator: str


PAYLOAD_TYPES: dict[RecordKind, type] = {
    RecordKind.EVENTS: EventsPayload,
    RecordKind.EXPLAIN: ExplainPayload,
    RecordKind.QUESTIONS: QuestionsPayload,
    RecordKind.RELATIONSHIP: RelationshipPayload,
    RecordKind.IMAGE: ImagePayload,
}

Payload = EventsPayload | ExplainPayload | QuestionsPayload | RelationshipPayload | ImagePayload


@dataclass
class GenerationRecord:
    """One model interaction: inputs, raw output, parsed payload, sources."""

    id: str
    kind: RecordKind
    topic: str
    context: str
    raw_output: str
    parsed: Payload
    title: str
    subevents: list[str] | None = None
    citations: list[Citation] = field(default_factory=list)
    created_at: datetime = field(default_factory=utc_now)
    latency_ms: int = 0

    def prose(self) -> str:
        """Display prose that citation anchors index into."""
        if isinstance(self.parsed, ExplainPayload):
            return self.parsed.text
        if isinstance(self.parsed, RelationshipPayload):
            return self.parsed.text.plain_text
        return self.raw_output

    def referenced_event_ids(self) -> set[str]:
        """Every event id this record points at (payload ids plus resolved
        markup spans)."""
        ids: set[str] = set()
        parsed = self.parsed
        if isinstance(parsed, EventsPayload):
            ids.update(parsed.event_ids)
        elif isinstance(parsed, ExplainPayload):
            if parsed.node_id:
                ids.add(parsed.node_id)
        elif isinstance(parsed, RelationshipPayload):
            ids.update(parsed.event_ids)
            ids.update(s.event_id for s in parsed.text.spans if s.event_id)
        return ids


@dataclass
class CanvasState:
    """The mutable exploration surface for one session."""

    session_id: str
    events: dict[str, TimelineEvent] = field(default_factory=dict)
    placements: dict[str, NodePlacement] = field(default_factory=dict)
    edges: list[Edge] = field(default_factory=list)
    scale: TimelineScale | None = None
    records: list[GenerationRecord] = field(default_factory=list)
    selection: set[str] = field(default_factory=set)

    def years(self) -> list[int]:
        return [e.year for e in self.events.values()]

    def find_record(self, record_id: str) -> GenerationRecord | None:
        for record in self.records:
            if record.id == record_id:
                return record
        return None

    def add_event(self, event: TimelineEvent, placement: NodePlacement) -> None:
        self.events[event.id] = event
        self.placements[event.id] = placement

    def delete_event(self, event_id: str) -> int:
        """Remove an event, its placement, its incident edges, and its
        selection membership. Returns the number of edges dropped."""
        self.events.pop(event_id, None)
        self.placements.pop(event_id, None)
        self.selection.discard(event_id)
        before = len(self.edges)
        self.edges = [
            e for e in self.edges if e.from_node != event_id and e.to_node != event_id
        ]
        return before - len(self.edges)


def _year_violations(year: int, owner: str) -> list[str]:
    if abs(year) > YEAR_BOUND:
        return [f"{owner}: year {year} outside sanity bound |year| <= {YEAR_BOUND}"]
    return []


def validate_session(state: CanvasState) -> list[str]:
    """Check every structural invariant; returns [] iff the session is
    sound. Total function: never raises on malformed states."""
    violations: list[str] = []

    for event_id, event in state.events.items():
        if event.id != event_id:
            violations.append(f"event {event_id}: key does not match event.id {event.id}")
        if not event.name.strip():
            violations.append(f"event {event_id}: empty name")
        if len(event.name) > MAX_NAME_LEN:
            violations.append(
                f"event {event_id}: name longer than {MAX_NAME_LEN} characters"
            )
        violations.extend(_year_violations(event.year, f"event {event_id}"))
        if event.explanation is not None and len(event.explanation) > MAX_EXPLANATION_LEN:
            violations.append(
                f"event {event_id}: explanation exceeds the {MAX_EXPLANATION_LEN}-character bound"
            )

    for event_id, placement in state.placements.items():
        if event_id not in state.events:
            violations.append(f"placement {event_id}: references missing event")
            continue
        if placement.event_id != event_id:
            violations.append(
                f"placement {event_id}: key does not match placement.event_id"
            )
        if state.scale is not None and not placement.pinned:
            expected = _scale_x(state.scale, state.events[event_id].year)
            if abs(placement.x - expected) > 1e-6:
                violations.append(
                    f"placement {event_id}: unpinned x {placement.x:.4f} deviates from "
                    f"scale position {expected:.4f}"
                )

    seen_edge_ids: set[str] = set()
    for edge in state.edges:
        if edge.id in seen_edge_ids:
            violations.append(f"edge {edge.id}: duplicate edge id")
        seen_edge_ids.add(edge.id)
        for endpoint in (edge.from_node, edge.to_node):
            if endpoint not in state.events:
                violations.append(f"edge {edge.id}: endpoint {endpoint} does not exist")

    if state.scale is not None:
        if state.scale.pixels_per_year <= 0:
            violations.append("scale: pixels_per_year must be positive")
        if state.scale.zoom <= 0:
            violations.append("scale: zoom must be positive")
        for event in state.events.values():
            if not (state.scale.min_year <= event.year <= state.scale.max_year):
                violations.append(
                    f"scale: event {event.id} year {event.year} outside "
                    f"[{state.scale.min_year}, {state.scale.max_year}]"
                )

    seen_record_ids: set[str] = set()
    for record in state.records:
        if record.id in seen_record_ids:
            violations.append(f"record {record.id}: duplicate record id")
        seen_record_ids.add(record.id)
        if not record.title.strip():
            violations.append(f"record {record.id}: empty title")
        if record.latency_ms < 0:
            violations.append(f"record {record.id}: negative latency")
        expected_type = PAYLOAD_TYPES[record.kind]
        if not isinstance(record.parsed, expected_type):
            violations.append(
                f"record {record.id}: parsed payload {type(record.parsed).__name__} "
                f"does not match kind {record.kind.value}"
            )
            continue
        prose_len = len(record.prose())
        for i, citation in enumerate(record.citations):
            if citation.anchor is not None:
                start, end = citation.anchor
                if not (0 <= start <= end <= prose_len):
                    violations.append(
                        f"record {record.id}: citation {i} anchor {citation.anchor} "
                        f"outside prose length {prose_len}"
                    )
        if isinstance(record.parsed, RelationshipPayload):
            violations.extend(_span_violations(record))

    for node_id in state.selection:
        if node_id not in state.events:
            violations.append(f"selection: node {node_id} does not exist")

    return violations


def _span_violations(record: GenerationRecord) -> list[str]:
    violations: list[str] = []
    text = record.parsed.text
    length = len(text.plain_text)
    prev_end = 0
    for span in text.spans:
        if not (0 <= span.start <= span.end <= length):
            violations.append(
                f"record {record.id}: span [{span.start},{span.end}) outside text"
            )
        elif span.start < prev_end:
            violations.append(
                f"record {record.id}: spans overlap or are out of order at {span.start}"
            )
        prev_end = max(prev_end, span.end)
    return violations


def _scale_x(scale: TimelineScale, year: int) -> float:
    # Mirrors layout.year_to_x; duplicated to keep the model free of
    # layout imports (layout depends on these types).
    from gentl.layout import MARGIN_PX

    return MARGIN_PX + (year - scale.min_year) * scale.pixels_per_year
