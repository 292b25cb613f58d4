"""Pure timeline geometry: year-to-pixel mapping, dynamic range, lane
assignment, semantic-zoom mode, and viewport fitting.

Every function here works on immutable snapshots and returns new values;
the service layer applies them under its per-session lock. Fixed design
constants (margins, lane height, node box, dim opacity) are pinned here
so tests can assert exact numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from gentl.errors import EmptyTimeline, InvalidParams, UnknownNode, UnknownRecord
from gentl.model import (
    CanvasState,
    EventType,
    GenerationRecord,
    NodePlacement,
    TimelineScale,
)

MARGIN_PX = 40.0
LANE_HEIGHT_PX = 70.0
NODE_BOX_W = 160.0
NODE_BOX_H = 50.0
DIM_OPACITY = 0.25
DOT_ZOOM_THRESHOLD = 0.4
ZOOM_MIN = 0.01
ZOOM_MAX = 10.0
DEFAULT_CANVAS_WIDTH = 1280.0
FIT_PADDING = 0.9
TICK_TARGET = 8


class RenderMode(str, Enum):
    FULL_NODE = "full"
    DOT = "dot"


@dataclass
class Viewport:
    center_x: float
    center_y: float
    zoom: float
    width: float
    height: float


def recompute_scale(years: list[int], canvas_width: float = DEFAULT_CANVAS_WIDTH) -> TimelineScale:
    """Fit the timeline range to the given years with 5% padding.

    pad = max(1, ceil(0.05 * span)); span 0 collapses to pad 1 so a single
    year still produces a drawable range.
    """
    if not years:
        raise EmptyTimeline("cannot compute a scale without years")
    if canvas_width < 100:
        raise InvalidParams("canvas_width must be at least 100 px")
    lo, hi = min(years), max(years)
    span = hi - lo
    # Integer ceil of span/20: float 0.05*span overshoots for e.g. span=100.
    pad = max(1, (span + 19) // 20)
    min_year = lo - pad
    max_year = hi + pad
    usable = canvas_width - 2 * MARGIN_PX
    return TimelineScale(
        min_year=min_year,
        max_year=max_year,
        pixels_per_year=usable / (max_year - min_year),
    )


def year_to_x(scale: TimelineScale, year: int) -> float:
    """Linear chronological position; extrapolates outside the range."""
    return MARGIN_PX + (year - scale.min_year) * scale.pixels_per_year


def assign_lanes(
    placements: dict[str, NodePlacement],
    node_width: float = NODE_BOX_W,
    baseline_y: float = 0.0,
) -> dict[str, NodePlacement]:
    """Stack overlapping nodes into lanes; pinned nodes stay put.

    Greedy interval scheduling over x-extents [x, x + node_width): nodes
    sorted by x each take the lowest lane whose last occupant ended at or
    before their start. For interval graphs this greedy uses exactly as
    many lanes as the largest mutually-overlapping clique.
    """
    out = dict(placements)
    unpinned = sorted(
        (p for p in placements.values() if not p.pinned),
        key=lambda p: (p.x, p.event_id),
    )
    lane_ends: list[float] = []
    for placement in unpinned:
        lane = None
        for i, end in enumerate(lane_ends):
            if end <= placement.x:
                lane = i
                break
        if lane is None:
            lane = len(lane_ends)
            lane_ends.append(0.0)
        lane_ends[lane] = placement.x + node_width
        out[placement.event_id] = replace(
            placement, y=baseline_y - lane * LANE_HEIGHT_PX
        )
    return out


def render_mode(zoom: float) -> RenderMode:
    """Semantic zoom: nodes collapse into dots at or below 0.4."""
    if zoom <= 0:
        raise InvalidParams("zoom must be positive")
    return RenderMode.DOT if zoom <= DOT_ZOOM_THRESHOLD else RenderMode.FULL_NODE


def fit_viewport(
    node_ids: set[str],
    state: CanvasState,
    screen_w: float,
    screen_h: float,
) -> Viewport:
    """Viewport covering the nodes' bounding box with 10% slack.

    A single node is centered at its placement coordinate at default zoom.
    """
    if not node_ids:
        raise InvalidParams("fit_viewport requires at least one node id")
    missing = [nid for nid in node_ids if nid not in state.placements]
    if missing:
        raise UnknownNode(f"unknown node(s): {', '.join(sorted(missing))}")
    points = [state.placements[nid] for nid in node_ids]
    if len(points) == 1:
        p = points[0]
        return Viewport(p.x, p.y, 1.0, screen_w, screen_h)
    min_x = min(p.x for p in points)
    max_x = max(p.x + NODE_BOX_W for p in points)
    min_y = min(p.y for p in points)
    max_y = max(p.y + NODE_BOX_H for p in points)
    bbox_w = max_x - min_x
    bbox_h = max_y - min_y
    zoom = min(1.0, FIT_PADDING * min(screen_w / bbox_w, screen_h / bbox_h))
    zoom = max(zoom, ZOOM_MIN)
    return Viewport(
        center_x=(min_x + max_x) / 2,
        center_y=(min_y + max_y) / 2,
        zoom=zoom,
        width=screen_w,
        height=screen_h,
    )


def dim_mask(record: GenerationRecord, state: CanvasState) -> dict[str, float]:
    """Full opacity for the record's events, 0.25 for everything else."""
    if state.find_record(record.id) is None:
        raise UnknownRecord(f"record {record.id} not in session")
    focused = record.referenced_event_ids() & state.events.keys()
    return {
        event_id: 1.0 if event_id in focused else DIM_OPACITY
        for event_id in state.events
    }


def filter_by_type(
    event_type: EventType,
    state: CanvasState,
    screen_w: float,
    screen_h: float,
) -> tuple[set[str], Viewport | None]:
    """Highlight all events of one type and fit the viewport over them.

    No matches leaves the caller's viewport untouched (returned as None).
    """
    highlight = {e.id for e in state.events.values() if e.event_type == event_type}
    if not highlight:
        return set(), None
    return highlight, fit_viewport(highlight, state, screen_w, screen_h)


def format_year_label(year: int) -> str:
    if year < 0:
        return f"{-year} BC"
    return str(year)


def nice_ticks(scale: TimelineScale, target: int = TICK_TARGET) -> list[int]:
    """Axis tick years at 1/2/5 x 10^k intervals, aiming for ~target ticks."""
    span = scale.max_year - scale.min_year
    raw_step = max(span / target, 1e-9)
    step = 1
    while True:
        for mult in (1, 2, 5):
            candidate = step * mult
            if candidate >= raw_step:
                step = candidate
                break
        else:
            step *= 10
            continue
        break
    first = -(-scale.min_year // step) * step
    return list(range(first, scale.max_year + 1, step))


def layout_snapshot(state: CanvasState, zoom: float) -> list[dict]:
    """Serialized node layout consumed by the HTTP layer and the UI."""
    mode = render_mode(zoom).value
    snapshot = []
    for event_id, placement in state.placements.items():
        event = state.events[event_id]
        snapshot.append(
            {
                "event_id": event_id,
                "x": placement.x,
                "y": placement.y,
                "mode": mode,
                "opacity": 1.0,
                "label": f"{event.name} ({format_year_label(event.year)})",
            }
        )
    snapshot.sort(key=lambda n: n["x"])
    return snapshot
