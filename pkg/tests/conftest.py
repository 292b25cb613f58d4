from __future__ import annotations

from pathlib import Path

import pytest

from gentl.gateway import MockProvider
from gentl.model import (
    CanvasState,
    EventType,
    NodePlacement,
    TimelineEvent,
    new_id,
)
from gentl.service import TimelineService

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES_DIR = REPO_ROOT / "fixtures"
GOLDEN_DIR = Path(__file__).resolve().parent / "data" / "golden"

AOD_NAMES = [
    "Christopher Columbus' first voyage",
    "John Cabot's discovery of Newfoundland",
    "Vasco Núñez de Balboa discovers the Pacific Ocean",
    "Hernán Cortés conquers the Aztec Empire",
    "Francisco Pizarro conquers the Inca Empire",
    "Jacques Cartier's first voyage, discovering Canada",
    "Sir Walter Raleigh's expedition to Roanoke",
    "Founding of Jamestown",
]

AOD_YEARS = [1492, 1497, 1513, 1521, 1533, 1534, 1584, 1607]


def golden(name: str) -> str:
    return (GOLDEN_DIR / name).read_text("utf-8")


def make_session(events: list[tuple[str, int, EventType]] | None = None) -> CanvasState:
    """Session with simple placements (x = year so geometry is easy to
    reason about in tests that do not involve a scale)."""
    state = CanvasState(session_id=new_id())
    for name, year, event_type in events or []:
        event = TimelineEvent(id=new_id(), name=name, year=year, event_type=event_type)
        state.add_event(
            event, NodePlacement(event_id=event.id, x=float(year), y=0.0, pinned=True)
        )
    return state


@pytest.fixture
def mock_provider() -> MockProvider:
    return MockProvider(fixtures_dir=FIXTURES_DIR, mode="demo")


@pytest.fixture
def strict_provider() -> MockProvider:
    return MockProvider(fixtures_dir=FIXTURES_DIR, mode="strict")


@pytest.fixture
def service(mock_provider, tmp_path) -> TimelineService:
    return TimelineService(
        mock_provider, sessions_dir=tmp_path / "sessions", backoff_base_s=0.0
    )
