"""Session orchestration: the end-to-end flows behind every interaction.

One ``TimelineService`` owns many sessions. Mutations on a session are
serialized by a per-session lock, but provider calls never run under it:
each flow snapshots what it needs, talks to the model, then reacquires
the lock, re-checks that its referents still exist (they may have been
deleted mid-flight), and applies the mutation atomically.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from gentl import gateway, layout, parsers, prompts, store
from gentl.errors import (
    InvalidParams,
    TooFewEvents,
    MalformedResponse,
    UnknownNode,
    UnknownRecord,
    UnknownSession,
)
from gentl.gateway import CompletionRequest, CompletionResult, Provider, RequestBudget
from gentl.model import (
    CanvasState,
    Citation,
    Edge,
    EdgeKind,
    EventType,
    ExplainPayload,
    GenerationRecord,
    ImagePayload,
    NodePlacement,
    QuestionsPayload,
    RecordKind,
    RelationshipPayload,
    TimelineEvent,
    new_id,
    validate_session,
)
from gentl.parsers import EventDraft
from gentl.prompts import DEFAULT_CONTEXT, PromptParams

logger = logging.getLogger("gentl.service")


@dataclass
class _Session:
    state: CanvasState
    lock: threading.RLock = field(default_factory=threading.RLock)
    budget: RequestBudget | None = None


@dataclass
class EventsOutcome:
    events: list[TimelineEvent]
    edges: list[Edge]
    record: GenerationRecord | None
    warnings: list[str]


class TimelineService:
    def __init__(
        self,
        provider: Provider,
        sessions_dir: str | Path | None = None,
        canvas_width: float = layout.DEFAULT_CANVAS_WIDTH,
        screen: tuple[float, float] = (1280.0, 800.0),
        request_cap: int | None = None,
        strict_parse: bool = False,
        images_enabled: bool = False,
        backoff_base_s: float = gateway.BACKOFF_BASE_S,
    ):
        self.provider = provider
        self.sessions_dir = Path(sessions_dir) if sessions_dir else None
        self.canvas_width = canvas_width
        self.screen = screen
        self.request_cap = request_cap
        self.strict_parse = strict_parse
        self.images_enabled = images_enabled
        self.backoff_base_s = backoff_base_s
        self._sessions: dict[str, _Session] = {}
        self._registry_lock = threading.Lock()

    # --- session registry -----------------------------------------------

    def create_session(self) -> str:
        state = CanvasState(session_id=new_id())
        self._register(state)
        return state.session_id

    def _register(self, state: CanvasState) -> None:
        budget = (
            RequestBudget(max_requests=self.request_cap)
            if self.request_cap is not None
            else None
        )
        with self._registry_lock:
            self._sessions[state.session_id] = _Session(state=state, budget=budget)

    def _session(self, session_id: str) -> _Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(f"no session {session_id}")
        return session

    def session_ids(self) -> list[str]:
        with self._registry_lock:
            return list(self._sessions)

    def session_doc(self, session_id: str) -> dict:
        session = self._session(session_id)
        with session.lock:
            return store.serialize_session(session.state)

    def load_sessions(self, directory: str | Path) -> list[str]:
        """Register every session document found in a directory."""
        loaded = []
        for path in sorted(Path(directory).glob("*.json")):
            if path.name == "index.json":
                continue
            state = store.load_session(path)
            self._register(state)
            loaded.append(state.session_id)
        return loaded

    def save(self, session_id: str, path: str | Path | None = None) -> Path:
        session = self._session(session_id)
        if path is None:
            if self.sessions_dir is None:
                raise InvalidParams("no sessions directory configured")
            path = self.sessions_dir / f"{session_id}.json"
        with session.lock:
            store.save_session(session.state, path)
        return Path(path)

    # --- generation flows -------------------------------------------------

    def generate_events(
        self,
        session_id: str,
        topic: str = "",
        context: str = "",
        source_node: str | None = None,
        num_of_topics: int | None = None,
        num_of_margin: int | None = None,
    ) -> EventsOutcome:
        """Generate events, place them, and append the auto-generated
        relationship paragraph as one record.

        Expanding from a node (``source_node``) pre-fills the topic with
        the node's name and draws provenance arrows from it. The events
        are kept even when the follow-up relationship completion fails;
        the record then carries an error note instead of prose.
        """
        session = self._session(session_id)
        with session.lock:
            if source_node is not None:
                node = session.state.events.get(source_node)
                if node is None:
                    raise UnknownNode(f"no node {source_node}")
                if not topic.strip():
                    topic = node.name
        params = PromptParams(
            topic=topic,
            context=context.strip() or DEFAULT_CONTEXT,
            num_of_topics=(
                num_of_topics if num_of_topics is not None else prompts.DEFAULT_NUM_OF_TOPICS
            ),
            num_of_margin=(
                num_of_margin if num_of_margin is not None else prompts.DEFAULT_NUM_OF_MARGIN
            ),
        )
        params.validate()

        events_result, drafts, warnings = self._complete_events(params, session)
        if not drafts:
            warnings.append("model returned no events; nothing was added")
            return EventsOutcome(events=[], edges=[], record=None, warnings=warnings)

        names = [d.name for d in drafts]
        note = None
        relationship_result = CompletionResult(text="")
        if len(names) >= 2:
            try:
                relationship_result = self._complete(
                    prompts.build_relationship_prompt(params.topic, params.context, names),
                    RecordKind.RELATIONSHIP,
                    session,
                    topic=params.topic,
                    context=params.context,
                    subevents=tuple(names),
                    with_citations=True,
                )
            except Exception as exc:  # noqa: BLE001 - events survive this failure
                note = f"relationship generation failed: {exc}"
                logger.warning("auto-relationship failed for %s: %s", session_id, exc)
        else:
            note = "relationship skipped: fewer than two events generated"
        warnings.extend(relationship_result.warnings)

        record_id = new_id()
        with session.lock:
            state = session.state
            if source_node is not None and source_node not in state.events:
                raise UnknownNode(f"source node {source_node} removed during generation")
            new_events = []
            for draft in drafts:
                event = TimelineEvent(
                    id=new_id(),
                    name=draft.name,
                    year=draft.year,
                    event_type=draft.event_type,
                    origin=record_id,
                )
                state.add_event(event, NodePlacement(event_id=event.id, x=0.0, y=0.0))
                new_events.append(event)
            new_edges = []
            if source_node is not None:
                for event in new_events:
                    edge = Edge(
                        id=new_id(),
                        kind=EdgeKind.PROVENANCE,
                        from_node=source_node,
                        to_node=event.id,
                        record=record_id,
                    )
                    state.edges.append(edge)
                    new_edges.append(edge)
            self._relayout(state)

            markup, markup_warnings = parsers.parse_relationship_markup(
                relationship_result.text,
                [(e.id, e.name) for e in state.events.values()],
            )
            warnings.extend(markup_warnings)
            record = GenerationRecord(
                id=record_id,
                kind=RecordKind.RELATIONSHIP,
                topic=params.topic,
                context=params.context,
                subevents=names,
                raw_output=relationship_result.text,
                parsed=RelationshipPayload(
                    text=markup,
                    event_ids=[e.id for e in new_events],
                    events_raw=events_result.text,
                    note=note,
                ),
                citations=self._anchored(
                    relationship_result.citations, markup.plain_text, warnings
                ),
                title=f"{params.topic} — {params.context}",
                latency_ms=events_result.latency_ms + relationship_result.latency_ms,
            )
            state.records.append(record)
            return EventsOutcome(
                events=new_events, edges=new_edges, record=record, warnings=warnings
            )

    def explain(
        self,
        session_id: str,
        topic: str = "",
        context: str = "",
        node: str | None = None,
    ) -> tuple[GenerationRecord, list[str]]:
        """Detailed explanation; optionally attached to a node, which also
        receives a derived 1-2 sentence summary."""
        session = self._session(session_id)
        with session.lock:
            if node is not None:
                event = session.state.events.get(node)
                if event is None:
                    raise UnknownNode(f"no node {node}")
                if not topic.strip():
                    topic = event.name
        context = context.strip() or DEFAULT_CONTEXT
        result = self._complete(
            prompts.build_explain_prompt(topic, context),
            RecordKind.EXPLAIN,
            session,
            topic=topic,
            context=context,
            with_citations=True,
        )
        warnings = list(result.warnings)
        text = result.text
        if len(text) > 3000:
            warnings.append(
                f"explanation of {len(text)} characters truncated to the 3000 bound"
            )
            text = text[:3000]

        with session.lock:
            state = session.state
            if node is not None:
                event = state.events.get(node)
                if event is None:
                    raise UnknownNode(f"node {node} removed during generation")
                event.explanation = text
                event.short_summary = parsers.derive_short_summary(text)
            record = GenerationRecord(
                id=new_id(),
                kind=RecordKind.EXPLAIN,
                topic=topic,
                context=context,
                raw_output=result.text,
                parsed=ExplainPayload(text=text, node_id=node),
                citations=self._anchored(result.citations, text, warnings),
                title=topic,
                latency_ms=result.latency_ms,
            )
            state.records.append(record)
        if self.images_enabled:
            self._generate_image(session, topic, text)
        return record, warnings

    def questions(
        self, session_id: str, topic: str, context: str = ""
    ) -> tuple[list[str], GenerationRecord]:
        """Five follow-up questions; answering one delegates to explain."""
        session = self._session(session_id)
        context = context.strip() or DEFAULT_CONTEXT
        prompt = prompts.build_questions_prompt(topic, context)
        result = self._complete(
            prompt, RecordKind.QUESTIONS, session, topic=topic, context=context
        )
        try:
            questions, warnings = parsers.parse_questions(result.text)
        except MalformedResponse:
            result = self._complete(
                prompt, RecordKind.QUESTIONS, session, topic=topic, context=context
            )
            questions, warnings = parsers.parse_questions(result.text)
        for warning in warnings:
            logger.info("questions parse: %s", warning)
        with session.lock:
            record = GenerationRecord(
                id=new_id(),
                kind=RecordKind.QUESTIONS,
                topic=topic,
                context=context,
                raw_output=result.text,
                parsed=QuestionsPayload(questions=questions),
                title=topic,
                latency_ms=result.latency_ms,
            )
            session.state.records.append(record)
        return questions, record

    def answer_question(
        self, session_id: str, question: str, context: str = ""
    ) -> tuple[GenerationRecord, list[str]]:
        return self.explain(session_id, topic=question, context=context)

    def generate_relationship(
        self, session_id: str, node_ids: set[str] | list[str]
    ) -> tuple[GenerationRecord, list[Edge]]:
        """Explain how the selected events relate; chain them with edges.

        Selection is ordered chronologically; the session's most recent
        generation context steers the prompt.
        """
        ids = list(dict.fromkeys(node_ids))
        if len(ids) < 2:
            raise TooFewEvents("select two or more nodes")
        session = self._session(session_id)
        with session.lock:
            state = session.state
            missing = [nid for nid in ids if nid not in state.events]
            if missing:
                raise UnknownNode(f"unknown node(s): {', '.join(missing)}")
            ordered = sorted(
                (state.events[nid] for nid in ids), key=lambda e: (e.year, e.name, e.id)
            )
            names = [e.name for e in ordered]
            ordered_ids = [e.id for e in ordered]
            context = self._last_context(state)
        topic = ", ".join(names)
        result = self._complete(
            prompts.build_relationship_prompt(topic, context, names),
            RecordKind.RELATIONSHIP,
            session,
            topic=topic,
            context=context,
            subevents=tuple(names),
            with_citations=True,
        )
        warnings = list(result.warnings)

        with session.lock:
            state = session.state
            gone = [nid for nid in ordered_ids if nid not in state.events]
            if gone:
                raise UnknownNode(f"node(s) removed during generation: {', '.join(gone)}")
            markup, markup_warnings = parsers.parse_relationship_markup(
                result.text, [(e.id, e.name) for e in state.events.values()]
            )
            warnings.extend(markup_warnings)
            record = GenerationRecord(
                id=new_id(),
                kind=RecordKind.RELATIONSHIP,
                topic=topic,
                context=context,
                subevents=names,
                raw_output=result.text,
                parsed=RelationshipPayload(text=markup, event_ids=ordered_ids),
                citations=self._anchored(result.citations, markup.plain_text, warnings),
                title=topic,
                latency_ms=result.latency_ms,
            )
            state.records.append(record)
            edges = []
            for a, b in zip(ordered_ids, ordered_ids[1:]):
                edge = Edge(
                    id=new_id(),
                    kind=EdgeKind.RELATIONSHIP,
                    from_node=a,
                    to_node=b,
                    record=record.id,
                )
                state.edges.append(edge)
                edges.append(edge)
            for warning in warnings:
                logger.info("relationship: %s", warning)
            return record, edges

    # --- node ops ---------------------------------------------------------

    def move_node(self, session_id: str, node_id: str, x: float, y: float) -> NodePlacement:
        session = self._session(session_id)
        with session.lock:
            placement = session.state.placements.get(node_id)
            if placement is None:
                raise UnknownNode(f"no node {node_id}")
            placement.x = x
            placement.y = y
            placement.pinned = True
            return placement

    def delete_node(self, session_id: str, node_id: str) -> dict:
        session = self._session(session_id)
        with session.lock:
            state = session.state
            if node_id not in state.events:
                raise UnknownNode(f"no node {node_id}")
            dropped_edges = state.delete_event(node_id)
            self._relayout(state)
            return {"deleted": node_id, "edges_removed": dropped_edges}

    def select(self, session_id: str, node_ids: set[str] | list[str]) -> set[str]:
        session = self._session(session_id)
        with session.lock:
            state = session.state
            missing = [nid for nid in node_ids if nid not in state.events]
            if missing:
                raise UnknownNode(f"unknown node(s): {', '.join(missing)}")
            state.selection = set(node_ids)
            return set(state.selection)

    # --- view ops -----------------------------------------------------------

    def layout_snapshot(self, session_id: str, zoom: float = 1.0) -> dict:
        session = self._session(session_id)
        with session.lock:
            state = session.state
            nodes = layout.layout_snapshot(state, zoom)
            ticks = []
            scale_doc = None
            if state.scale is not None:
                ticks = [
                    {
                        "year": year,
                        "x": layout.year_to_x(state.scale, year),
                        "label": layout.format_year_label(year),
                    }
                    for year in layout.nice_ticks(state.scale)
                ]
                scale_doc = {
                    "min_year": state.scale.min_year,
                    "max_year": state.scale.max_year,
                    "pixels_per_year": state.scale.pixels_per_year,
                }
            edges = [
                {
                    "id": e.id,
                    "kind": e.kind.value,
                    "from_node": e.from_node,
                    "to_node": e.to_node,
                }
                for e in state.edges
            ]
            return {"nodes": nodes, "edges": edges, "ticks": ticks, "scale": scale_doc}

    def focus_record(self, session_id: str, record_id: str) -> dict:
        session = self._session(session_id)
        with session.lock:
            state = session.state
            record = state.find_record(record_id)
            if record is None:
                raise UnknownRecord(f"no record {record_id}")
            mask = layout.dim_mask(record, state)
            referenced = record.referenced_event_ids() & state.events.keys()
            viewport = (
                layout.fit_viewport(referenced, state, *self.screen)
                if referenced
                else None
            )
            return {"viewport": _viewport_doc(viewport), "opacity": mask}

    def focus_event(self, session_id: str, node_id: str) -> dict:
        session = self._session(session_id)
        with session.lock:
            state = session.state
            if node_id not in state.events:
                raise UnknownNode(f"no node {node_id}")
            viewport = layout.fit_viewport({node_id}, state, *self.screen)
            return {"viewport": _viewport_doc(viewport), "highlight": [node_id]}

    def filter_type(self, session_id: str, label: str) -> dict:
        try:
            event_type = EventType(label)
        except ValueError:
            raise InvalidParams(f"unknown event type {label!r}") from None
        session = self._session(session_id)
        with session.lock:
            highlight, viewport = layout.filter_by_type(
                event_type, session.state, *self.screen
            )
            return {
                "highlight": sorted(highlight),
                "viewport": _viewport_doc(viewport),
            }

    def export(self, session_id: str, fmt: str = "outline") -> str:
        session = self._session(session_id)
        with session.lock:
            return store.export_timeline(session.state, fmt)

    # --- internals ----------------------------------------------------------

    def _complete_events(
        self, params: PromptParams, session: _Session
    ) -> tuple[CompletionResult, list[EventDraft], list[str]]:
        prompt = prompts.build_events_prompt(params)
        request = CompletionRequest(
            prompt=prompt,
            kind=RecordKind.EVENTS,
            topic=params.topic,
            context=params.context,
            num_of_topics=params.num_of_topics,
        )
        result = gateway.complete(
            request, self.provider, session.budget, backoff_base_s=self.backoff_base_s
        )
        try:
            drafts, warnings = parsers.parse_events(result.text, strict=self.strict_parse)
        except MalformedResponse:
            # One re-ask before giving up; live models often self-correct.
            result = gateway.complete(
                request, self.provider, session.budget, backoff_base_s=self.backoff_base_s
            )
            drafts, warnings = parsers.parse_events(result.text, strict=self.strict_parse)
        return result, drafts, warnings

    def _complete(
        self,
        prompt: str,
        kind: RecordKind,
        session: _Session,
        topic: str = "",
        context: str = "",
        subevents: tuple[str, ...] | None = None,
        with_citations: bool = False,
    ) -> CompletionResult:
        request = CompletionRequest(
            prompt=prompt,
            kind=kind,
            topic=topic,
            context=context,
            subevents=subevents,
        )
        run = gateway.complete_with_citations if with_citations else gateway.complete
        return run(
            request, self.provider, session.budget, backoff_base_s=self.backoff_base_s
        )

    def _generate_image(self, session: _Session, topic: str, description: str) -> None:
        try:
            result = self._complete(
                prompts.build_image_prompt(topic, description),
                RecordKind.IMAGE,
                session,
                topic=topic,
                context=description,
            )
        except Exception as exc:  # noqa: BLE001 - image is a side dish
            logger.warning("image generation failed: %s", exc)
            return
        with session.lock:
            session.state.records.append(
                GenerationRecord(
                    id=new_id(),
                    kind=RecordKind.IMAGE,
                    topic=topic,
                    context="",
                    raw_output=result.text,
                    parsed=ImagePayload(locator=result.text),
                    title=topic,
                    latency_ms=result.latency_ms,
                )
            )

    def _relayout(self, state: CanvasState) -> None:
        """Recompute scale, reposition unpinned nodes, restack lanes."""
        years = state.years()
        if not years:
            state.scale = None
            return
        state.scale = layout.recompute_scale(years, self.canvas_width)
        for placement in state.placements.values():
            if not placement.pinned:
                placement.x = layout.year_to_x(
                    state.scale, state.events[placement.event_id].year
                )
        state.placements = layout.assign_lanes(state.placements)

    def _last_context(self, state: CanvasState) -> str:
        for record in reversed(state.records):
            if record.context.strip():
                return record.context
        return DEFAULT_CONTEXT

    def _anchored(
        self, citations: list[Citation], prose: str, warnings: list[str]
    ) -> list[Citation]:
        """Re-check anchors against the display prose (markup stripping can
        shorten it); out-of-range anchors are dropped, not the citation."""
        checked = []
        for citation in citations:
            anchor = citation.anchor
            if anchor is not None and not (0 <= anchor[0] <= anchor[1] <= len(prose)):
                warnings.append(
                    f"citation {citation.title!r}: anchor beyond prose, dropped"
                )
                anchor = None
            checked.append(Citation(title=citation.title, url=citation.url, anchor=anchor))
        return checked

    def validate(self, session_id: str) -> list[str]:
        session = self._session(session_id)
        with session.lock:
            return validate_session(session.state)


def _viewport_doc(viewport: layout.Viewport | None) -> dict | None:
    if viewport is None:
        return None
    return {
        "center_x": viewport.center_x,
        "center_y": viewport.center_y,
        "zoom": viewport.zoom,
        "width": viewport.width,
        "height": viewport.height,
    }
