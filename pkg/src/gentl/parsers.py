"""Parsers for model output: event lists, question CSVs, relationship
markup, and summary derivation.

All parsers are lenient by default (live models wrap JSON in prose and
drift from instructions); recoverable deviations surface as warning
strings rather than errors, and none of them raise on arbitrary input
except the documented ``MalformedResponse`` cases.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from gentl.errors import MalformedResponse
from gentl.model import YEAR_BOUND, EventType, RelationshipText, Span

SHORT_SUMMARY_MAX = 400

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?])\s+")
_QUESTION_BOUNDARY = re.compile(r"(?<=\?)\s*,")
_MARKER = re.compile(r"=([^=@]*)@([^=]*)=")
_YEAR_TEXT = re.compile(r"^-?\d+$")


@dataclass
class EventDraft:
    """Parsed event before it gets an id and a placement."""

    name: str
    year: int
    event_type: EventType


def _extract_events_object(raw: str, strict: bool) -> dict:
    if strict:
        try:
            obj = json.loads(raw)
        except ValueError as exc:
            raise MalformedResponse(f"not valid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "events" not in obj:
            raise MalformedResponse('top-level object lacks an "events" key')
        return obj
    # Lenient: scan for the first balanced object carrying an "events"
    # key, which skips code fences and surrounding prose for free.
    decoder = json.JSONDecoder()
    for match in re.finditer(r"\{", raw):
        try:
            obj, _ = decoder.raw_decode(raw, match.start())
        except ValueError:
            continue
        if isinstance(obj, dict) and "events" in obj:
            return obj
    raise MalformedResponse('no parseable "events" object found')


def _parse_year(value: object) -> int | None:
    if isinstance(value, bool):
        return None
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    text = str(value).strip().strip("\"'").strip()
    if not _YEAR_TEXT.match(text):
        return None
    return int(text)


def parse_events(raw: str, strict: bool = False) -> tuple[list[EventDraft], list[str]]:
    """Parse an events response into drafts sorted ascending by year.

    Duplicate (name, year) pairs are dropped with a warning; unrecognized
    type labels degrade to ``Other``; entries with an unusable name or
    year are skipped. Raises ``MalformedResponse`` only when no events
    object can be located at all.
    """
    if not raw.strip():
        raise MalformedResponse("empty response")
    obj = _extract_events_object(raw, strict)
    entries = obj["events"]
    if not isinstance(entries, list):
        raise MalformedResponse('"events" is not a list')

    warnings: list[str] = []
    drafts: list[EventDraft] = []
    seen: set[tuple[str, int]] = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            warnings.append(f"entry {i}: not an object, skipped")
            continue
        fields = {str(k).lower(): v for k, v in entry.items()}
        name = str(fields.get("event_name", "")).strip()
        if not name:
            warnings.append(f"entry {i}: missing event name, skipped")
            continue
        year = _parse_year(fields.get("year", ""))
        if year is None:
            warnings.append(f"entry {i} ({name}): unparseable year, skipped")
            continue
        if abs(year) > YEAR_BOUND:
            warnings.append(f"entry {i} ({name}): year {year} beyond sanity bound, skipped")
            continue
        if year == 0:
            warnings.append(f"entry {i} ({name}): year 0 has no calendar meaning")
        event_type, recognized = EventType.from_label(str(fields.get("type", "")))
        if not recognized:
            warnings.append(
                f"entry {i} ({name}): unrecognized type "
                f"{str(fields.get('type', ''))!r}, using Other"
            )
        key = (name, year)
        if key in seen:
            warnings.append(f"entry {i} ({name}, {year}): duplicate, dropped")
            continue
        seen.add(key)
        drafts.append(EventDraft(name=name, year=year, event_type=event_type))

    drafts.sort(key=lambda d: d.year)
    return drafts, warnings


def serialize_events(drafts: list[EventDraft]) -> str:
    """Inverse of ``parse_events`` on well-formed drafts (round-trip)."""
    return json.dumps(
        {
            "events": [
                {"Event_name": d.name, "Year": str(d.year), "Type": d.event_type.value}
                for d in drafts
            ]
        },
        ensure_ascii=False,
    )


def parse_questions(raw: str) -> tuple[list[str], list[str]]:
    """Split a questions response into at most five question texts.

    Newline-separated lists win when they yield two or more segments
    ending in '?'; otherwise split at '?,' boundaries so commas inside a
    question survive. Raises ``MalformedResponse`` when nothing that looks
    like a question is recovered.
    """
    if not raw.strip():
        raise MalformedResponse("empty response")
    warnings: list[str] = []

    newline_segments = [line.strip() for line in raw.splitlines() if line.strip()]
    questions = [seg for seg in newline_segments if seg.endswith("?")]
    if len(questions) < 2:
        questions = []
        for segment in _QUESTION_BOUNDARY.split(raw):
            segment = segment.strip()
            if not segment:
                continue
            if segment.endswith("?"):
                questions.append(segment)
            else:
                warnings.append(f"dropped non-question segment {segment[:48]!r}")

    if not questions:
        raise MalformedResponse("no questions recovered")
    if len(questions) > 5:
        warnings.append(f"{len(questions)} questions returned, truncated to 5")
        questions = questions[:5]
    return questions, warnings


def parse_relationship_markup(
    raw: str, known_events: list[tuple[str, str]]
) -> tuple[RelationshipText, list[str]]:
    """Extract ``=display@EventName=`` reference markers.

    Referenced names match ``known_events`` (id, name) pairs
    case-insensitively after trimming; unmatched names yield unresolved
    spans. Stray or unbalanced '=' characters stay literal with a single
    warning. ``RelationshipText.to_markup`` reverses this exactly for
    marker-balanced input.
    """
    lookup: dict[str, str] = {}
    for event_id, name in known_events:
        lookup.setdefault(name.strip().lower(), event_id)

    plain_parts: list[str] = []
    spans: list[Span] = []
    literal_has_equals = False
    pos = 0
    offset = 0
    for match in _MARKER.finditer(raw):
        literal = raw[pos:match.start()]
        literal_has_equals = literal_has_equals or "=" in literal
        plain_parts.append(literal)
        offset += len(literal)
        display, name = match.group(1), match.group(2)
        spans.append(
            Span(
                start=offset,
                end=offset + len(display),
                display=display,
                name=name,
                event_id=lookup.get(name.strip().lower()),
            )
        )
        plain_parts.append(display)
        offset += len(display)
        pos = match.end()
    tail = raw[pos:]
    literal_has_equals = literal_has_equals or "=" in tail
    plain_parts.append(tail)

    warnings: list[str] = []
    if literal_has_equals:
        warnings.append("stray or unbalanced '=' markers left as literal text")
    return RelationshipText(plain_text="".join(plain_parts), spans=spans), warnings


def derive_short_summary(explanation: str) -> str:
    """First two sentence units of an explanation, hard-capped at 400
    characters with a trailing ellipsis."""
    units = [u for u in _SENTENCE_SPLIT.split(explanation.strip()) if u]
    summary = " ".join(units[:2])
    if len(summary) > SHORT_SUMMARY_MAX:
        summary = summary[: SHORT_SUMMARY_MAX - 1] + "…"
    return summary
