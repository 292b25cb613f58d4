"""Factual-accuracy bookkeeping: human labels over a generation log,
rolled up into per-category accuracy percentages.

Two aggregation modes ship because they genuinely differ: ``pooled``
divides total correct by total labeled across the whole log, while
``per_study_macro`` averages per-study pooled percentages (requires a
study field on the log's records). Percentages round half-up to one
decimal.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from enum import Enum
from pathlib import Path

from gentl.errors import DanglingLabel, InvalidParams, MissingStudyKey, ParseError
from gentl.model import GenerationRecord
from gentl.store import record_doc


class AuditCategory(str, Enum):
    EVENT_OCCURRENCE = "EventOccurrence"
    EVENT_YEAR = "EventYear"
    DESCRIPTION = "Description"
    RELATIONSHIP = "Relationship"


PER_EVENT_CATEGORIES = {AuditCategory.EVENT_OCCURRENCE, AuditCategory.EVENT_YEAR}

CATEGORY_ORDER = [
    AuditCategory.EVENT_OCCURRENCE,
    AuditCategory.EVENT_YEAR,
    AuditCategory.DESCRIPTION,
    AuditCategory.RELATIONSHIP,
]


class Verdict(str, Enum):
    CORRECT = "Correct"
    INCORRECT = "Incorrect"


@dataclass
class AuditLabel:
    record_id: str
    category: AuditCategory
    verdict: Verdict
    item_index: int | None = None
    note: str = ""


@dataclass
class CategoryRow:
    category: AuditCategory
    total: int
    correct: int
    percent: float | None  # None renders as "n/a" (no labels)


def _round_percent(correct: int, total: int) -> float:
    exact = Decimal(100 * correct) / Decimal(total)
    return float(exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _as_docs(records: list) -> list[dict]:
    return [
        record_doc(r) if isinstance(r, GenerationRecord) else dict(r) for r in records
    ]


def _event_count(record: dict) -> int | None:
    parsed = record.get("parsed") or {}
    ids = parsed.get("event_ids")
    return len(ids) if isinstance(ids, list) else None


def _check_labels(records: dict[str, dict], labels: list[AuditLabel]) -> None:
    for label in labels:
        record = records.get(label.record_id)
        if record is None:
            raise DanglingLabel(f"label references unknown record {label.record_id}")
        if label.category in PER_EVENT_CATEGORIES:
            if label.item_index is None:
                raise DanglingLabel(
                    f"{label.category.value} label on {label.record_id} "
                    "needs an item index"
                )
            count = _event_count(record)
            if count is not None and not (0 <= label.item_index < count):
                raise DanglingLabel(
                    f"label item index {label.item_index} outside record "
                    f"{label.record_id} ({count} events)"
                )


def audit_report(
    records: list,
    labels: list[AuditLabel],
    mode: str = "pooled",
    study_key: str | None = None,
) -> list[CategoryRow]:
    """Per-category accuracy over labeled generations.

    ``records`` may be GenerationRecord objects or serialized record
    dicts (log files may carry extra fields such as a study marker, which
    ``study_key`` names for macro mode). Unlabeled items never count
    toward totals.
    """
    if mode not in ("pooled", "per_study_macro"):
        raise InvalidParams(f"unknown audit mode {mode!r}")
    docs = _as_docs(records)
    by_id = {doc["id"]: doc for doc in docs}
    _check_labels(by_id, labels)

    if mode == "pooled":
        return [
            _pooled_row(category, labels) for category in CATEGORY_ORDER
        ]

    if not study_key:
        raise MissingStudyKey("per_study_macro mode requires a study_key")
    studies: dict[object, list[AuditLabel]] = {}
    for label in labels:
        record = by_id[label.record_id]
        if study_key not in record:
            raise MissingStudyKey(
                f"record {label.record_id} lacks study field {study_key!r}"
            )
        studies.setdefault(record[study_key], []).append(label)

    rows: list[CategoryRow] = []
    for category in CATEGORY_ORDER:
        per_study: list[Decimal] = []
        total = correct = 0
        for study_labels in studies.values():
            relevant = [l for l in study_labels if l.category is category]
            if not relevant:
                continue
            good = sum(1 for l in relevant if l.verdict is Verdict.CORRECT)
            total += len(relevant)
            correct += good
            per_study.append(Decimal(100 * good) / Decimal(len(relevant)))
        if not per_study:
            rows.append(CategoryRow(category, 0, 0, None))
            continue
        mean = sum(per_study) / len(per_study)
        percent = float(mean.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))
        rows.append(CategoryRow(category, total, correct, percent))
    return rows


def _pooled_row(category: AuditCategory, labels: list[AuditLabel]) -> CategoryRow:
    relevant = [l for l in labels if l.category is category]
    if not relevant:
        return CategoryRow(category, 0, 0, None)
    correct = sum(1 for l in relevant if l.verdict is Verdict.CORRECT)
    return CategoryRow(
        category, len(relevant), correct, _round_percent(correct, len(relevant))
    )


def format_report(rows: list[CategoryRow]) -> str:
    """Aligned text table."""
    header = ("category", "total", "correct", "percent")
    body = [
        (
            row.category.value,
            str(row.total),
            str(row.correct),
            "n/a" if row.percent is None else f"{row.percent:.1f}",
        )
        for row in rows
    ]
    widths = [
        max(len(header[i]), *(len(line[i]) for line in body)) for i in range(4)
    ]
    lines = [
        "  ".join(header[i].ljust(widths[i]) for i in range(4)),
        "  ".join("-" * widths[i] for i in range(4)),
    ]
    for line in body:
        lines.append("  ".join(line[i].ljust(widths[i]) for i in range(4)))
    return "\n".join(lines) + "\n"


def report_json(rows: list[CategoryRow]) -> list[dict]:
    return [
        {
            "category": row.category.value,
            "total": row.total,
            "correct": row.correct,
            "percent": row.percent,
        }
        for row in rows
    ]


# --- labels file -------------------------------------------------------
#
# Tab-separated, one label per line:
#   record_id <TAB> category <TAB> item_index ('' if none) <TAB> verdict <TAB> note
# Tabs and newlines inside the note are escaped so lines stay one-per-label.


def _escape_note(note: str) -> str:
    return note.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape_note(note: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(note):
        ch = note[i]
        if ch == "\\" and i + 1 < len(note):
            nxt = note[i + 1]
            if nxt == "t":
                out.append("\t")
            elif nxt == "n":
                out.append("\n")
            elif nxt == "\\":
                out.append("\\")
            else:
                out.append(nxt)
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out)


def write_labels(labels: list[AuditLabel], path: str | Path) -> None:
    lines = []
    for label in labels:
        index = "" if label.item_index is None else str(label.item_index)
        lines.append(
            "\t".join(
                (
                    label.record_id,
                    label.category.value,
                    index,
                    label.verdict.value,
                    _escape_note(label.note),
                )
            )
        )
    Path(path).write_text("".join(line + "\n" for line in lines), "utf-8")


def read_labels(path: str | Path) -> list[AuditLabel]:
    labels: list[AuditLabel] = []
    text = Path(path).read_text("utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t", 4)
        if len(parts) != 5:
            raise ParseError(f"expected 5 tab-separated fields, got {len(parts)}", line_no)
        record_id, category_text, index_text, verdict_text, note = parts
        try:
            category = AuditCategory(category_text)
        except ValueError:
            raise ParseError(f"unknown category {category_text!r}", line_no) from None
        try:
            verdict = Verdict(verdict_text)
        except ValueError:
            raise ParseError(f"unknown verdict {verdict_text!r}", line_no) from None
        if index_text == "":
            item_index = None
        else:
            try:
                item_index = int(index_text)
            except ValueError:
                raise ParseError(f"bad item index {index_text!r}", line_no) from None
        labels.append(
            AuditLabel(
                record_id=record_id,
                category=category,
                verdict=verdict,
                item_index=item_index,
                note=_unescape_note(note),
            )
        )
    return labels
