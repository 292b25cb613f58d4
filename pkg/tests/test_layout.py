from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gentl.errors import EmptyTimeline, InvalidParams, UnknownNode, UnknownRecord
from gentl.layout import (
    DIM_OPACITY,
    LANE_HEIGHT_PX,
    NODE_BOX_W,
    RenderMode,
    assign_lanes,
    dim_mask,
    filter_by_type,
    fit_viewport,
    format_year_label,
    layout_snapshot,
    nice_ticks,
    recompute_scale,
    render_mode,
    year_to_x,
)
from gentl.model import (
    EventType,
    EventsPayload,
    GenerationRecord,
    NodePlacement,
    RecordKind,
)

from .conftest import make_session


# --- recompute_scale ----


def test_scale_for_reference_range():
    scale = recompute_scale([1492, 1607], 1280)
    assert (scale.min_year, scale.max_year) == (1486, 1613)
    assert scale.pixels_per_year == pytest.approx(1200 / 127)


def test_single_year_pads_by_one():
    scale = recompute_scale([1969], 1280)
    assert (scale.min_year, scale.max_year) == (1968, 1970)


def test_range_expansion_is_monotone():
    before = recompute_scale([1492, 1607], 1280)
    after = recompute_scale([1492, 1607, 1776], 1280)
    assert after.min_year <= before.min_year
    assert after.max_year >= 1776


def test_exact_five_percent_pad_has_no_float_artifact():
    scale = recompute_scale([1900, 2000], 1280)  # span 100 -> pad exactly 5
    assert (scale.min_year, scale.max_year) == (1895, 2005)


def test_empty_years_rejected():
    with pytest.raises(EmptyTimeline):
        recompute_scale([], 1280)


def test_narrow_canvas_rejected():
    with pytest.raises(InvalidParams):
        recompute_scale([1900], 99)


# --- year_to_x ----


def test_min_year_sits_on_the_margin():
    scale = recompute_scale([1492, 1607], 1280)
    assert year_to_x(scale, scale.min_year) == pytest.approx(40.0)


def test_reference_position():
    scale = recompute_scale([1492, 1607], 1280)
    assert year_to_x(scale, 1492) == pytest.approx(40 + 6 * (1200 / 127))
    assert year_to_x(scale, 1492) == pytest.approx(96.69, abs=0.01)


@given(
    years=st.lists(st.integers(-99_999, 99_999), min_size=1, max_size=20),
    pair=st.tuples(st.integers(-99_999, 99_999), st.integers(-99_999, 99_999)),
)
def test_year_to_x_is_strictly_increasing(years, pair):
    scale = recompute_scale(years, 1280)
    y1, y2 = sorted(pair)
    if y1 < y2:
        assert year_to_x(scale, y1) < year_to_x(scale, y2)


def test_range_closure_under_random_add_delete():
    rng = random.Random(42)
    years: list[int] = []
    for _ in range(1000):
        if not years or rng.random() < 0.6:
            years.append(rng.randint(-5000, 2025))
        else:
            years.pop(rng.randrange(len(years)))
        if not years:
            continue
        scale = recompute_scale(years, 1280)
        assert all(scale.min_year <= y <= scale.max_year for y in years)


def test_deleting_extremal_event_contracts_span():
    years = [1492, 1550, 1607]
    wide = recompute_scale(years, 1280)
    narrow = recompute_scale(years[:-1], 1280)
    assert (narrow.max_year - narrow.min_year) < (wide.max_year - wide.min_year)


# --- assign_lanes ----


def _placements(xs: list[float], pinned: bool = False) -> dict[str, NodePlacement]:
    return {
        f"n{i}": NodePlacement(event_id=f"n{i}", x=x, y=0.0, pinned=pinned)
        for i, x in enumerate(xs)
    }


def lane_of(placement: NodePlacement) -> int:
    return round(-placement.y / LANE_HEIGHT_PX)


def min_lanes_brute_force(xs: list[float], width: float) -> int:
    """Smallest number of lanes with no same-lane overlap, by exhaustion."""
    n = len(xs)
    for k in range(1, n + 1):
        for assignment in itertools.product(range(k), repeat=n):
            ok = True
            for i in range(n):
                for j in range(i + 1, n):
                    if assignment[i] == assignment[j] and abs(xs[i] - xs[j]) < width:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                return k
    return n


def test_distant_nodes_share_lane_zero():
    out = assign_lanes(_placements([0.0, 500.0]), node_width=160)
    assert [lane_of(p) for p in out.values()] == [0, 0]


def test_identical_x_forces_two_lanes():
    out = assign_lanes(_placements([100.0, 100.0]), node_width=160)
    assert sorted(lane_of(p) for p in out.values()) == [0, 1]


def test_chain_overlap_matches_clique_bound():
    xs = [0.0, 50.0, 100.0, 150.0, 200.0]  # all pairwise-overlapping neighbors
    out = assign_lanes(_placements(xs), node_width=160)
    lanes = [lane_of(out[f"n{i}"]) for i in range(len(xs))]
    assert max(lanes) + 1 == min_lanes_brute_force(xs, 160)


def test_greedy_matches_brute_force_oracle_for_small_sets():
    rng = random.Random(3)
    grid = [0.0, 40.0, 80.0, 120.0, 160.0, 200.0, 240.0, 320.0]
    for _ in range(150):
        xs = [rng.choice(grid) for _ in range(rng.randint(1, 6))]
        out = assign_lanes(_placements(xs), node_width=160)
        used = max(lane_of(p) for p in out.values()) + 1
        assert used == min_lanes_brute_force(xs, 160), xs


def test_pinned_nodes_are_untouched():
    placements = _placements([100.0, 100.0])
    placements["n0"].pinned = True
    placements["n0"].y = -999.0
    out = assign_lanes(placements, node_width=160)
    assert out["n0"].y == -999.0
    assert lane_of(out["n1"]) == 0  # unpinned stacking ignores pinned nodes


@given(
    xs=st.lists(st.floats(0, 2000, allow_nan=False, allow_infinity=False), min_size=1, max_size=25)
)
def test_no_same_lane_overlap(xs):
    out = assign_lanes(_placements(xs), node_width=160)
    by_lane: dict[int, list[float]] = {}
    for placement in out.values():
        by_lane.setdefault(lane_of(placement), []).append(placement.x)
    for lane_xs in by_lane.values():
        lane_xs.sort()
        for a, b in zip(lane_xs, lane_xs[1:]):
            assert b - a >= 160


# --- render_mode ----


def test_dot_at_threshold():
    assert render_mode(0.4) is RenderMode.DOT


def test_full_node_just_above_threshold():
    assert render_mode(0.41) is RenderMode.FULL_NODE


def test_full_node_at_default_zoom():
    assert render_mode(1.0) is RenderMode.FULL_NODE


def test_render_mode_is_a_step_function():
    for zoom in [0.01, 0.1, 0.25, 0.399, 0.4]:
        assert render_mode(zoom) is RenderMode.DOT
    for zoom in [0.400001, 0.5, 1.0, 5.0, 10.0]:
        assert render_mode(zoom) is RenderMode.FULL_NODE


def test_render_mode_requires_positive_zoom():
    with pytest.raises(InvalidParams):
        render_mode(0.0)


# --- fit_viewport ----


def _session_with_placements(points: list[tuple[float, float]]):
    state = make_session(
        [(f"E{i}", 1900 + i, EventType.OTHER) for i in range(len(points))]
    )
    for placement, (x, y) in zip(state.placements.values(), points):
        placement.x, placement.y = x, y
    return state


def test_single_node_centers_at_default_zoom():
    state = _session_with_placements([(200.0, 300.0)])
    (node_id,) = state.events
    viewport = fit_viewport({node_id}, state, 800, 600)
    assert (viewport.center_x, viewport.center_y, viewport.zoom) == (200.0, 300.0, 1.0)


def test_two_node_fit_matches_formula():
    state = _session_with_placements([(0.0, 0.0), (1000.0, 0.0)])
    viewport = fit_viewport(set(state.events), state, 800, 600)
    assert viewport.zoom == pytest.approx(0.9 * 800 / 1160)
    assert viewport.zoom == pytest.approx(0.6207, abs=1e-4)
    assert viewport.center_x == pytest.approx(580.0)


def test_empty_id_set_rejected():
    state = _session_with_placements([(0.0, 0.0)])
    with pytest.raises(InvalidParams):
        fit_viewport(set(), state, 800, 600)


def test_unknown_node_rejected():
    state = _session_with_placements([(0.0, 0.0)])
    with pytest.raises(UnknownNode):
        fit_viewport({"ghost"}, state, 800, 600)


@given(
    points=st.lists(
        st.tuples(st.floats(-5000, 5000), st.floats(-2000, 2000)),
        min_size=2,
        max_size=10,
    )
)
def test_fit_viewport_contains_bounding_box(points):
    state = _session_with_placements(points)
    viewport = fit_viewport(set(state.events), state, 800, 600)
    half_w = viewport.width / viewport.zoom / 2
    half_h = viewport.height / viewport.zoom / 2
    slack = 1e-6
    for placement in state.placements.values():
        assert viewport.center_x - half_w - slack <= placement.x
        assert placement.x + NODE_BOX_W <= viewport.center_x + half_w + slack
        assert viewport.center_y - half_h - slack <= placement.y


# --- dim_mask / filter_by_type ----


def _record_over(ids: list[str]) -> GenerationRecord:
    return GenerationRecord(
        id="rec1",
        kind=RecordKind.EVENTS,
        topic="t",
        context="c",
        raw_output="",
        parsed=EventsPayload(event_ids=ids),
        title="t",
    )


def test_dim_mask_all_referenced():
    state = make_session([("A", 1900, EventType.ART), ("B", 1950, EventType.ART)])
    record = _record_over(list(state.events))
    state.records.append(record)
    assert set(dim_mask(record, state).values()) == {1.0}


def test_dim_mask_none_referenced():
    state = make_session([("A", 1900, EventType.ART), ("B", 1950, EventType.ART)])
    record = _record_over([])
    state.records.append(record)
    assert set(dim_mask(record, state).values()) == {DIM_OPACITY}


def test_dim_mask_partial():
    state = make_session([(f"E{i}", 1900 + i, EventType.ART) for i in range(8)])
    ids = list(state.events)
    record = _record_over(ids[:3])
    state.records.append(record)
    mask = dim_mask(record, state)
    assert sum(1 for v in mask.values() if v == 1.0) == 3
    assert len(mask) == 8


def test_dim_mask_unknown_record():
    state = make_session([("A", 1900, EventType.ART)])
    with pytest.raises(UnknownRecord):
        dim_mask(_record_over([]), state)


def test_filter_matches_all():
    state = make_session([("A", 1900, EventType.ART), ("B", 1950, EventType.ART)])
    highlight, viewport = filter_by_type(EventType.ART, state, 800, 600)
    assert highlight == set(state.events)
    assert viewport is not None


def test_filter_matches_none():
    state = make_session([("A", 1900, EventType.ART)])
    highlight, viewport = filter_by_type(EventType.THEORY, state, 800, 600)
    assert highlight == set()
    assert viewport is None


def test_filter_reference_mix():
    mix = [
        ("Christopher Columbus' first voyage", 1492, EventType.DISCOVERY),
        ("John Cabot's discovery of Newfoundland", 1497, EventType.DISCOVERY),
        ("Vasco Núñez de Balboa discovers the Pacific Ocean", 1513, EventType.DISCOVERY),
        ("Hernán Cortés conquers the Aztec Empire", 1521, EventType.POLITICS),
        ("Francisco Pizarro conquers the Inca Empire", 1533, EventType.POLITICS),
        ("Jacques Cartier's first voyage, discovering Canada", 1534, EventType.DISCOVERY),
        ("Sir Walter Raleigh's expedition to Roanoke", 1584, EventType.DISCOVERY),
        ("Founding of Jamestown", 1607, EventType.POLITICS),
    ]
    state = make_session(mix)
    highlight, _ = filter_by_type(EventType.POLITICS, state, 800, 600)
    assert len(highlight) == 3
    assert {state.events[i].year for i in highlight} == {1521, 1533, 1607}


# --- labels and ticks ----


def test_year_labels():
    assert format_year_label(1492) == "1492"
    assert format_year_label(-500) == "500 BC"
    assert format_year_label(0) == "0"


def test_nice_ticks_land_on_round_steps():
    scale = recompute_scale([1492, 1607], 1280)
    ticks = nice_ticks(scale)
    assert 4 <= len(ticks) <= 16
    step = ticks[1] - ticks[0]
    digits = int(str(step).rstrip("0") or "1")
    assert digits in (1, 2, 5)
    assert all(b - a == step for a, b in zip(ticks, ticks[1:]))
    assert all(scale.min_year <= t <= scale.max_year for t in ticks)


def test_layout_snapshot_shape():
    state = make_session([("A", -500, EventType.ART), ("B", 1950, EventType.OTHER)])
    snapshot = layout_snapshot(state, zoom=0.3)
    assert [n["mode"] for n in snapshot] == ["dot", "dot"]
    labels = {n["label"] for n in snapshot}
    assert labels == {"A (500 BC)", "B (1950)"}
    assert all(set(n) == {"event_id", "x", "y", "mode", "opacity", "label"} for n in snapshot)
